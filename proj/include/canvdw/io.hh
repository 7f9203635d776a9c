/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#ifndef CANVDW_GUARD_IO_HH
#define CANVDW_GUARD_IO_HH 1

#include <canvdw/ap_core.hh>
#include <canvdw/colouring.hh>
#include <canvdw/decider.hh>
#include <canvdw/errors.hh>
#include <canvdw/hypergraph_cycles.hh>
#include <canvdw/rainbow_hypergraph.hh>

#include <nlohmann/json.hpp>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace canvdw
{
    using Json = nlohmann::ordered_json;

    /// Input that parsed but does not describe a valid object (for example
    /// a colouring not in restricted-growth form).
    class IngestError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    inline auto read_file(const std::filesystem::path & path) -> std::string
    {
        std::ifstream in{path, std::ios::binary};
        if (! in)
            throw IngestError("cannot read '" + path.string() + "'");
        std::ostringstream buffer;
        buffer << in.rdbuf();
        return buffer.str();
    }

    namespace detail
    {
        inline auto trim(std::string_view s) -> std::string_view
        {
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
                s.remove_prefix(1);
            while (! s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
                s.remove_suffix(1);
            return s;
        }

        inline auto parse_integer(std::string_view text) -> Integer
        {
            auto s = trim(text);
            std::size_t used = 0;
            Integer value = 0;
            try {
                value = std::stoll(std::string(s), &used);
            }
            catch (const std::exception &) {
                throw InvalidParameter("malformed integer '" + std::string(text) + "'");
            }
            if (used != s.size())
                throw InvalidParameter("malformed integer '" + std::string(text) + "'");
            return value;
        }

        inline auto integers_from_json(const Json & j, const std::string & what) -> std::vector<Integer>
        {
            if (! j.is_array())
                throw IngestError(what + " must be a JSON array of integers");
            std::vector<Integer> result;
            for (auto & v : j) {
                if (! v.is_number_integer())
                    throw IngestError(what + " must be a JSON array of integers");
                result.push_back(v.get<Integer>());
            }
            return result;
        }

        inline auto make_set(std::vector<Integer> elements) -> GroundSet
        {
            for (auto x : elements)
                if (x < 1)
                    throw InvalidParameter("set elements must be positive integers, got " + std::to_string(x));
            return GroundSet::from_unsorted(std::move(elements));
        }
    }

    /// Parses a set given as "a..b", a comma list "x,y,z", or the path of a
    /// file holding a JSON array or one integer per line. The result is
    /// sorted and deduplicated, with ambient bound its largest element.
    inline auto parse_set_spec(std::string_view spec) -> GroundSet
    {
        auto text = detail::trim(spec);
        if (text.empty())
            throw InvalidParameter("empty set specification");

        if (std::filesystem::is_regular_file(std::filesystem::path{std::string(text)})) {
            auto content = read_file(std::string(text));
            auto body = detail::trim(content);
            if (! body.empty() && body.front() == '[') {
                Json j;
                try {
                    j = Json::parse(body);
                }
                catch (const nlohmann::json::exception & e) {
                    throw IngestError("set file '" + std::string(text) + "' is not valid JSON: " + e.what());
                }
                return detail::make_set(detail::integers_from_json(j, "set file"));
            }
            std::vector<Integer> elements;
            std::istringstream lines{content};
            std::string line;
            while (std::getline(lines, line)) {
                auto item = detail::trim(line);
                if (item.empty() || item.front() == '#')
                    continue;
                try {
                    elements.push_back(detail::parse_integer(item));
                }
                catch (const InvalidParameter &) {
                    throw IngestError("set file '" + std::string(text) + "' has a malformed line '" + line + "'");
                }
            }
            return detail::make_set(std::move(elements));
        }

        if (text == "{}" || text == "[]" || text == "empty")
            return GroundSet{};

        if (auto dots = text.find(".."); dots != std::string_view::npos) {
            auto a = detail::parse_integer(text.substr(0, dots)), b = detail::parse_integer(text.substr(dots + 2));
            if (a < 1 || b < a)
                throw InvalidParameter("range '" + std::string(text) + "' must satisfy 1 <= a <= b");
            std::vector<Integer> elements;
            for (Integer x = a ; x <= b ; ++x)
                elements.push_back(x);
            return detail::make_set(std::move(elements));
        }

        if (text.front() == '[')
            text = text.substr(1, text.size() - (text.back() == ']' ? 2 : 1));
        std::vector<Integer> elements;
        std::size_t start = 0;
        while (start <= text.size()) {
            auto comma = text.find(',', start);
            auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
            elements.push_back(detail::parse_integer(item));
            if (comma == std::string_view::npos)
                break;
            start = comma + 1;
        }
        return detail::make_set(std::move(elements));
    }

    /// Reads colours (inline JSON array or a file holding one) for the given
    /// domain. The list must already be in restricted-growth form.
    inline auto parse_colouring(std::string_view spec, const GroundSet & domain) -> Colouring
    {
        std::string text{detail::trim(spec)};
        if (std::filesystem::is_regular_file(std::filesystem::path{text}))
            text = read_file(text);

        Json j;
        try {
            j = Json::parse(text);
        }
        catch (const nlohmann::json::exception & e) {
            throw IngestError(std::string("colouring is not valid JSON: ") + e.what());
        }
        if (j.is_object() && j.contains("colours"))
            j = j["colours"];
        std::vector<Colour> colours;
        for (auto x : detail::integers_from_json(j, "colouring")) {
            if (x < 0)
                throw IngestError("colours must be non-negative");
            colours.push_back(Colour(x));
        }
        try {
            return Colouring{domain, std::move(colours)};
        }
        catch (const InvalidParameter & e) {
            throw IngestError(e.what());
        }
    }

    inline auto to_json(const GroundSet & set) -> Json
    {
        auto result = Json::array();
        for (auto x : set)
            result.push_back(x);
        return result;
    }

    inline auto to_json(const Colouring & colouring) -> Json
    {
        auto colours = Json::array();
        for (auto c : colouring.assignment())
            colours.push_back(c);
        return Json{{"domain", to_json(colouring.domain())}, {"colours", colours}};
    }

    inline auto certificate_to_json(const DecisionResult & result) -> Json
    {
        if (auto c = result.colouring()) {
            auto j = to_json(*c);
            return Json{{"kind", "colouring"}, {"domain", j["domain"]}, {"colours", j["colours"]}};
        }
        if (auto s = result.subset())
            return Json{{"kind", "subset"}, {"elements", to_json(*s)}};
        return nullptr;
    }

    inline auto to_json(const Girth & g) -> Json
    {
        if (g.is_infinite())
            return "infinity";
        return g.value();
    }

    /// Edges by index with their vertex labels, plus the linking vertices'
    /// labels.
    template <typename Vertex_>
    auto cycle_to_json(const UniformHypergraph<Vertex_> & h, const HypergraphCycle & cycle) -> Json
    {
        auto edges = Json::array(), members = Json::array(), linking = Json::array();
        for (auto e : cycle.edges) {
            edges.push_back(e);
            auto m = Json::array();
            for (auto v : h.edge(e))
                m.push_back(h.vertex(v));
            members.push_back(m);
        }
        for (auto v : cycle.linking_vertices)
            linking.push_back(h.vertex(v));
        return Json{{"length", cycle.length()}, {"edges", edges}, {"edge_members", members}, {"linking_vertices", linking}};
    }

    inline auto to_json(const ColouredInteger & v) -> Json
    {
        return Json::array({v.colour, v.value});
    }

    /// Vertices with their labels and the edge list as vertex-index tuples.
    inline auto adjacency_json(const RainbowHypergraph & rainbow) -> Json
    {
        auto & h = rainbow.underlying();
        auto vertices = Json::array(), edges = Json::array();
        for (auto & v : h.vertices())
            vertices.push_back(to_json(v));
        for (std::size_t e = 0 ; e < h.num_edges() ; ++e) {
            auto members = Json::array();
            for (auto v : h.edge(e))
                members.push_back(v);
            edges.push_back(members);
        }
        return Json{{"n", rainbow.n()}, {"k", rainbow.k()}, {"r", rainbow.r()}, {"vertices", vertices}, {"edges", edges}};
    }

    /// Fixed-format decimal, identical across runs and platforms that
    /// share IEEE doubles.
    inline auto format_double(double x) -> std::string
    {
        char buffer[64];
        std::snprintf(buffer, sizeof(buffer), "%.10g", x);
        return buffer;
    }

    inline auto degree_report_csv(const DegreeBoundReport & report) -> std::string
    {
        std::string out = "l,max_degree,bound,pass\n";
        for (auto & row : report.rows)
            out += std::to_string(row.ell) + "," + std::to_string(row.max_degree) + "," + format_double(row.bound) + ","
                + (row.passes ? "true" : "false") + "\n";
        return out;
    }
}

#endif
