/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_COLOURING_HH
#define CANVDW_GUARD_COLOURING_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/errors.hh>
#include <canvdw/rational.hh>

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace canvdw
{
    using Colour = std::uint32_t;

    /// A colouring of a ground set, held in restricted-growth normal form:
    /// the first element has colour 0 and every later element has a colour at
    /// most one more than the largest colour seen before it. Each partition of
    /// the ground set has exactly one such representative.
    class Colouring
    {
        private:
            GroundSet _domain;
            std::vector<Colour> _assignment;
            std::size_t _palette_size = 0;

        public:
            Colouring() = default;

            /// Rejects assignments not in restricted-growth form; use
            /// normalize() to canonicalise arbitrary labels.
            Colouring(GroundSet domain, std::vector<Colour> assignment) :
                _domain(std::move(domain)),
                _assignment(std::move(assignment))
            {
                if (_assignment.size() != _domain.size())
                    throw InvalidParameter("colouring has " + std::to_string(_assignment.size()) +
                            " entries for a ground set of size " + std::to_string(_domain.size()));
                for (auto c : _assignment) {
                    if (c > _palette_size)
                        throw InvalidParameter("colouring is not in restricted-growth form");
                    if (c == _palette_size)
                        ++_palette_size;
                }
            }

            static auto constant(GroundSet domain) -> Colouring
            {
                auto size = domain.size();
                return Colouring{std::move(domain), std::vector<Colour>(size, 0)};
            }

            static auto all_distinct(GroundSet domain) -> Colouring
            {
                std::vector<Colour> assignment(domain.size());
                for (std::size_t i = 0 ; i < assignment.size() ; ++i)
                    assignment[i] = Colour(i);
                return Colouring{std::move(domain), std::move(assignment)};
            }

            auto domain() const -> const GroundSet &
            {
                return _domain;
            }

            auto assignment() const -> std::span<const Colour>
            {
                return _assignment;
            }

            auto palette_size() const -> std::size_t
            {
                return _palette_size;
            }

            auto colour_at(std::size_t index) const -> Colour
            {
                return _assignment[index];
            }

            auto colour_of(Integer x) const -> Colour
            {
                auto index = _domain.index_of(x);
                if (! index)
                    throw InvalidParameter("element " + std::to_string(x) + " is not in the colouring's domain");
                return _assignment[*index];
            }

            auto class_sizes() const -> std::vector<std::size_t>
            {
                std::vector<std::size_t> result(_palette_size, 0);
                for (auto c : _assignment)
                    ++result[c];
                return result;
            }

            auto operator== (const Colouring &) const -> bool = default;
    };

    /// Canonicalises per-element labels (one label per element, in element
    /// order) to restricted-growth form.
    template <typename Label_>
    auto normalize(const GroundSet & domain, std::span<const Label_> labels) -> Colouring
    {
        if (labels.size() != domain.size())
            throw InvalidParameter("colour map covers " + std::to_string(labels.size()) +
                    " of " + std::to_string(domain.size()) + " elements");
        std::map<Label_, Colour> relabel;
        std::vector<Colour> assignment;
        assignment.reserve(labels.size());
        for (auto & label : labels) {
            auto [it, fresh] = relabel.try_emplace(label, Colour(relabel.size()));
            assignment.push_back(it->second);
        }
        return Colouring{domain, std::move(assignment)};
    }

    template <typename Label_>
    auto normalize(const GroundSet & domain, const std::vector<Label_> & labels) -> Colouring
    {
        return normalize(domain, std::span<const Label_>{labels});
    }

    /// Canonicalises a colour map keyed by element. Every element of the
    /// domain must be mapped, and nothing else.
    template <typename Label_>
    auto normalize(const GroundSet & domain, const std::map<Integer, Label_> & colour_map) -> Colouring
    {
        std::vector<Label_> labels;
        labels.reserve(domain.size());
        for (auto x : domain) {
            auto it = colour_map.find(x);
            if (it == colour_map.end())
                throw InvalidParameter("partial colour map: element " + std::to_string(x) + " is uncoloured");
            labels.push_back(it->second);
        }
        if (colour_map.size() != domain.size())
            throw InvalidParameter("colour map mentions elements outside the domain");
        return normalize(domain, std::span<const Label_>{labels});
    }

    inline auto check_alpha(const Rational & alpha) -> void
    {
        if (alpha <= 0)
            throw InvalidParameter("alpha must be positive, got " + to_string(alpha));
    }

    inline auto check_unit_alpha(const Rational & alpha) -> void
    {
        check_alpha(alpha);
        if (alpha > 1)
            throw InvalidParameter("alpha must be at most 1, got " + to_string(alpha));
    }

    /// Every colour class has at most alpha |A| elements.
    inline auto is_alpha_bounded(const Colouring & colouring, const Rational & alpha) -> bool
    {
        check_alpha(alpha);
        auto total = std::int64_t(colouring.domain().size());
        for (auto size : colouring.class_sizes())
            if (! at_most_fraction_of(std::int64_t(size), alpha, total))
                return false;
        return true;
    }

    /// phi is a merging of chi when phi = pi . chi for some relabelling pi,
    /// i.e. chi's partition refines phi's.
    inline auto is_merging(const Colouring & phi, const Colouring & chi) -> bool
    {
        if (! phi.domain().same_elements(chi.domain()))
            throw InvalidParameter("is_merging needs colourings of the same ground set");
        std::vector<std::int64_t> image(chi.palette_size(), -1);
        for (std::size_t i = 0 ; i < chi.assignment().size() ; ++i) {
            auto & target = image[chi.colour_at(i)];
            if (target == -1)
                target = phi.colour_at(i);
            else if (target != std::int64_t(phi.colour_at(i)))
                return false;
        }
        return true;
    }

    /// Greedy colour merging: while two classes both have at most alpha|A|/2
    /// elements, merge the two with the smallest colour indices. The result
    /// is an alpha-bounded merging of chi with at most floor(4/alpha) colours.
    inline auto merge_colours(const Colouring & chi, const Rational & alpha) -> Colouring
    {
        if (! is_alpha_bounded(chi, alpha))
            throw PreconditionViolation("merge_colours needs an alpha-bounded colouring");

        auto total = std::int64_t(chi.domain().size());
        auto sizes = chi.class_sizes();
        std::vector<Colour> target(sizes.size());
        for (std::size_t c = 0 ; c < target.size() ; ++c)
            target[c] = Colour(c);

        // sparse: 2 |class| <= alpha |A|
        auto sparse = [&] (std::size_t size) { return at_most_fraction_of(std::int64_t(2 * size), alpha, total); };
        std::vector<bool> alive(sizes.size(), true);
        while (true) {
            std::size_t first = sizes.size(), second = sizes.size();
            for (std::size_t c = 0 ; c < sizes.size() && second == sizes.size() ; ++c)
                if (alive[c] && sparse(sizes[c])) {
                    if (first == sizes.size())
                        first = c;
                    else
                        second = c;
                }
            if (second == sizes.size())
                break;
            sizes[first] += sizes[second];
            sizes[second] = 0;
            alive[second] = false;
            for (auto & t : target)
                if (t == second)
                    t = Colour(first);
        }

        std::vector<Colour> merged;
        merged.reserve(chi.assignment().size());
        for (auto c : chi.assignment())
            merged.push_back(target[c]);
        return normalize(chi.domain(), merged);
    }

    enum class APColourClass
    {
        monochromatic,
        rainbow,
        neither
    };

    inline auto to_string(APColourClass c) -> std::string
    {
        switch (c) {
            case APColourClass::monochromatic: return "monochromatic";
            case APColourClass::rainbow:       return "rainbow";
            case APColourClass::neither:       return "neither";
        }
        return "?";
    }

    /// Classifies a list of element colours.
    inline auto classify_colours(std::span<const Colour> colours) -> APColourClass
    {
        bool all_equal = true, all_distinct = true;
        for (std::size_t i = 0 ; i < colours.size() ; ++i)
            for (std::size_t j = i + 1 ; j < colours.size() ; ++j) {
                if (colours[i] == colours[j])
                    all_distinct = false;
                else
                    all_equal = false;
            }
        if (all_equal)
            return APColourClass::monochromatic;
        if (all_distinct)
            return APColourClass::rainbow;
        return APColourClass::neither;
    }

    inline auto classify_ap(const Colouring & colouring, const ArithmeticProgression & ap) -> APColourClass
    {
        std::vector<Colour> colours;
        colours.reserve(ap.length);
        for (unsigned i = 0 ; i < ap.length ; ++i)
            colours.push_back(colouring.colour_of(ap.element(i)));
        return classify_colours(colours);
    }

    struct ColouredAPCounts
    {
        std::uint64_t monochromatic = 0;
        std::uint64_t rainbow = 0;
        std::uint64_t neither = 0;

        auto total() const -> std::uint64_t
        {
            return monochromatic + rainbow + neither;
        }

        auto operator== (const ColouredAPCounts &) const -> bool = default;
    };

    /// Classifies every k-AP of A under the colouring, which must be defined
    /// on all of A.
    inline auto count_coloured_aps(const GroundSet & set, const Colouring & colouring, unsigned k) -> ColouredAPCounts
    {
        if (! set.is_subset_of(colouring.domain()))
            throw InvalidParameter("colouring is not defined on the whole ground set");
        ColouredAPCounts result;
        for (auto & ap : enumerate_aps(set, k)) {
            switch (classify_ap(colouring, ap)) {
                case APColourClass::monochromatic: ++result.monochromatic; break;
                case APColourClass::rainbow:       ++result.rainbow;       break;
                case APColourClass::neither:       ++result.neither;       break;
            }
        }
        return result;
    }
}

#endif
