/* vim: set sw=4 sts=4 et foldmethod=syntax : */

#include <canvdw/ap_core.hh>
#include <canvdw/colouring.hh>
#include <canvdw/decider.hh>
#include <canvdw/hypergraph_cycles.hh>
#include <canvdw/io.hh>
#include <canvdw/rainbow_hypergraph.hh>
#include <canvdw/random_lab.hh>
#include <canvdw/version.hh>

#include <CLI11.hpp>

#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

using namespace canvdw;

namespace fs = std::filesystem;

namespace
{
    constexpr int exit_holds = 0;
    constexpr int exit_fails = 1;
    constexpr int exit_budget = 2;
    constexpr int exit_diagnostic = 3;
    constexpr int exit_usage = 64;
    constexpr int exit_ingest = 65;
    constexpr int exit_internal = 70;

    auto sha256_hex(const std::string & data) -> std::string
    {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int length = 0;
        if (! EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr))
            throw std::runtime_error("sha256 failed");
        std::ostringstream out;
        for (unsigned i = 0 ; i < length ; ++i)
            out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
        return out.str();
    }

    auto utc_timestamp(std::chrono::system_clock::time_point t, const char * format) -> std::string
    {
        auto seconds = std::chrono::system_clock::to_time_t(t);
        std::tm tm{};
        gmtime_r(&seconds, &tm);
        std::ostringstream out;
        out << std::put_time(&tm, format);
        return out.str();
    }

    /// Everything a subcommand produces. stdout and the artifacts are the
    /// reproducible outputs; details go to the manifest only.
    struct CommandOutput
    {
        int exit_code = exit_holds;
        Json stdout_json = Json::object();
        std::string human;
        std::vector<std::pair<std::string, std::string>> artifacts;
        Json details = Json::object();
        std::optional<std::uint64_t> seed;
        std::vector<std::string> input_files;
    };

    struct Options
    {
        std::string set, property, alpha, certificate, colouring, p = "1/2", resolution = "1/64", kind = "point", order = "smallest-domain";
        unsigned k = 3, r = 0;
        std::size_t g = 3, m = 1, lmax = 3, trials = 200, attempts = 100, batch = 50;
        Integer n = 0;
        std::uint64_t seed = 0, budget = 0, canonical_budget = 1'000'000;
        unsigned threads = 0;
        bool enumerate = false, no_decompose = false, early_stop = false, export_adjacency = false;
        std::vector<std::string> grid;
        std::vector<Integer> ns;
        double band = 2.0;
        std::string manifest;
    };

    auto budget_of(const Options & o) -> std::uint64_t
    {
        return o.budget == 0 ? std::numeric_limits<std::uint64_t>::max() : o.budget;
    }

    auto require(bool condition, const std::string & message) -> void
    {
        if (! condition)
            throw InvalidParameter(message);
    }

    auto decider_options(const Options & o) -> DeciderOptions
    {
        DeciderOptions options;
        options.node_budget = budget_of(o);
        options.decompose = ! o.no_decompose;
        if (o.order == "increasing")
            options.order = VariableOrder::increasing;
        else
            require(o.order == "smallest-domain", "--order must be smallest-domain or increasing");
        return options;
    }

    auto record_input(CommandOutput & out, const std::string & spec) -> void
    {
        if (! spec.empty() && fs::is_regular_file(spec))
            out.input_files.push_back(spec);
    }

    auto verdict_exit(Verdict v) -> int
    {
        switch (v) {
            case Verdict::holds:            return exit_holds;
            case Verdict::fails:            return exit_fails;
            case Verdict::budget_exhausted: return exit_budget;
        }
        return exit_internal;
    }

    auto property_of(const Options & o, bool allow_lab_only) -> Property
    {
        auto need_alpha = [&] {
            require(! o.alpha.empty(), "--property " + o.property + " needs --alpha");
            auto alpha = parse_rational(o.alpha);
            check_alpha(alpha);
            return alpha;
        };
        check_progression_length(o.k);
        if (o.property == "canvdw")
            return property::CanVdW{o.k};
        if (o.property == "rkvdw") {
            require(o.r >= 1, "--property rkvdw needs --r");
            return property::RkVdW{o.r, o.k};
        }
        if (o.property == "alpharb")
            return property::AlphaRb{need_alpha(), o.k};
        if (o.property == "alphasz")
            return property::AlphaSz{need_alpha(), o.k};
        if (allow_lab_only && o.property == "girth") {
            require(o.g >= 2, "--g must be at least 2");
            return property::GirthAtLeast{o.g, o.k};
        }
        if (allow_lab_only && o.property == "size")
            return property::SizeAtLeast{o.m};
        throw InvalidParameter("unknown property '" + o.property + "'");
    }

    auto decide_property(const Property & prop, const GroundSet & set, const DeciderOptions & options) -> DecisionResult
    {
        return std::visit([&] (const auto & p) -> DecisionResult {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, property::CanVdW>)
                    return is_can_k_vdW(set, p.k, options);
                else if constexpr (std::is_same_v<P, property::RkVdW>)
                    return is_r_k_vdW(set, p.r, p.k, options);
                else if constexpr (std::is_same_v<P, property::AlphaRb>)
                    return is_alpha_k_rb(set, p.alpha, p.k, options);
                else if constexpr (std::is_same_v<P, property::AlphaSz>)
                    return is_alpha_k_Sz(set, p.alpha, p.k, options);
                else
                    throw InvalidParameter("property not decidable here");
                }, prop);
    }

    auto run_decide(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        record_input(out, o.set);
        auto set = parse_set_spec(o.set);
        auto prop = property_of(o, false);
        auto options = decider_options(o);
        options.canonical_certificate_budget = o.canonical_budget;
        auto result = decide_property(prop, set, options);

        out.exit_code = verdict_exit(result.verdict);
        auto certificate = certificate_to_json(result);
        out.stdout_json = Json{{"property", to_string(prop)}, {"set_size", set.size()}, {"verdict", to_string(result.verdict)},
            {"nodes_explored", result.nodes_explored}, {"certificate", certificate}};
        out.artifacts.emplace_back("out.csv", "property,set_size,verdict,nodes_explored\n\"" + to_string(prop) + "\"," +
                std::to_string(set.size()) + "," + to_string(result.verdict) + "," + std::to_string(result.nodes_explored) + "\n");
        if (! certificate.is_null())
            out.artifacts.emplace_back("certificate.json", certificate.dump(2) + "\n");
        out.details["elapsed_seconds"] = std::chrono::duration<double>(result.elapsed).count();
        out.human = "verdict: " + to_string(result.verdict) + " (" + to_string(prop) + ", |A| = " + std::to_string(set.size()) + ")\n";
        return out;
    }

    /// Checks that a certificate witnesses failure of the property.
    auto run_verify(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        record_input(out, o.set);
        record_input(out, o.certificate);
        auto set = parse_set_spec(o.set);
        auto prop = property_of(o, false);
        require(! o.certificate.empty(), "verify needs --certificate");

        std::string text = o.certificate;
        if (fs::is_regular_file(text))
            text = read_file(text);
        Json j;
        try {
            j = Json::parse(text);
        }
        catch (const nlohmann::json::exception & e) {
            throw IngestError(std::string("certificate is not valid JSON: ") + e.what());
        }

        std::vector<std::string> problems;
        auto k = o.k;
        if (std::holds_alternative<property::AlphaSz>(prop)) {
            auto alpha = std::get<property::AlphaSz>(prop).alpha;
            auto elements = detail::integers_from_json(j.is_object() ? j.value("elements", Json::array()) : j, "subset certificate");
            auto subset = GroundSet::from_unsorted(elements, set.ambient_bound());
            if (! subset.is_subset_of(set))
                problems.push_back("subset is not contained in the set");
            if (! enumerate_aps(subset, k).empty())
                problems.push_back("subset contains a k-AP");
            if (! at_least_fraction_of(std::int64_t(subset.size()), alpha, std::int64_t(set.size())))
                problems.push_back("subset is smaller than alpha |A|");
        }
        else {
            auto colouring = parse_colouring(j.dump(), set);
            auto counts = count_coloured_aps(set, colouring, k);
            std::visit([&] (const auto & p) {
                    using P = std::decay_t<decltype(p)>;
                    if constexpr (std::is_same_v<P, property::CanVdW>) {
                        if (counts.monochromatic + counts.rainbow > 0)
                            problems.push_back("colouring has a monochromatic or rainbow k-AP");
                    }
                    else if constexpr (std::is_same_v<P, property::RkVdW>) {
                        if (colouring.palette_size() > p.r)
                            problems.push_back("colouring uses more than r colours");
                        if (counts.monochromatic > 0)
                            problems.push_back("colouring has a monochromatic k-AP");
                    }
                    else if constexpr (std::is_same_v<P, property::AlphaRb>) {
                        if (! is_alpha_bounded(colouring, p.alpha))
                            problems.push_back("colouring is not alpha-bounded");
                        if (counts.rainbow > 0)
                            problems.push_back("colouring has a rainbow k-AP");
                    }
                    }, prop);
        }

        out.exit_code = problems.empty() ? exit_holds : exit_fails;
        out.stdout_json = Json{{"property", to_string(prop)}, {"valid", problems.empty()}, {"problems", problems}};
        out.artifacts.emplace_back("out.csv", "property,valid\n\"" + to_string(prop) + "\"," + (problems.empty() ? "true" : "false") + "\n");
        out.human = problems.empty() ? "certificate valid\n" : "certificate invalid: " + problems.front() + "\n";
        return out;
    }

    auto run_count(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        require(o.n >= 1, "--n must be at least 1");
        check_progression_length(o.k);
        auto set = GroundSet::interval(o.n);
        std::string csv;
        if (o.colouring.empty()) {
            auto aps = count_aps_in_interval(o.n, o.k);
            out.stdout_json = Json{{"aps", aps}};
            csv = "n,k,aps\n" + std::to_string(o.n) + "," + std::to_string(o.k) + "," + std::to_string(aps) + "\n";
            out.human = std::to_string(aps) + " " + std::to_string(o.k) + "-APs in [" + std::to_string(o.n) + "]\n";
        }
        else {
            record_input(out, o.colouring);
            auto colouring = parse_colouring(o.colouring, set);
            auto counts = count_coloured_aps(set, colouring, o.k);
            out.stdout_json = Json{{"mono", counts.monochromatic}, {"rainbow", counts.rainbow}, {"neither", counts.neither}};
            csv = "n,k,mono,rainbow,neither\n" + std::to_string(o.n) + "," + std::to_string(o.k) + "," + std::to_string(counts.monochromatic)
                + "," + std::to_string(counts.rainbow) + "," + std::to_string(counts.neither) + "\n";
            out.human = "monochromatic " + std::to_string(counts.monochromatic) + ", rainbow " + std::to_string(counts.rainbow)
                + ", neither " + std::to_string(counts.neither) + "\n";
        }
        out.artifacts.emplace_back("out.csv", csv);
        return out;
    }

    auto run_girth(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        record_input(out, o.set);
        auto set = parse_set_spec(o.set);
        check_progression_length(o.k);
        auto h = build_ap_hypergraph(set, o.k);
        auto g = girth(h);
        out.stdout_json = Json{{"girth", to_json(g)}};
        std::string csv = "set_size,edges,girth\n" + std::to_string(set.size()) + "," + std::to_string(h.num_edges()) + "," + to_string(g) + "\n";
        out.human = "girth: " + to_string(g) + "\n";

        if (o.enumerate) {
            require(o.lmax >= 2, "--lmax must be at least 2");
            auto budget = o.budget == 0 ? default_cycle_budget : o.budget;
            try {
                auto cycles = enumerate_minimal_cycles(h, o.lmax, budget);
                auto list = Json::array();
                std::map<std::size_t, std::uint64_t> by_length;
                std::uint64_t span_failures = 0, span_checked = 0;
                for (auto & c : cycles) {
                    list.push_back(cycle_to_json(h, c));
                    ++by_length[c.length()];
                    if (c.length() >= 3) {
                        ++span_checked;
                        if (! check_cycle_span(h, c).passes())
                            ++span_failures;
                    }
                }
                auto counts = Json::object();
                for (auto & [length, count] : by_length)
                    counts[std::to_string(length)] = count;
                out.stdout_json["minimal_cycles"] = counts;
                out.stdout_json["span_check"] = Json{{"checked", span_checked}, {"failures", span_failures},
                    {"expected_span_per_length", o.k - 1}, {"passes", span_failures == 0}};
                out.artifacts.emplace_back("cycles.json", list.dump(1) + "\n");
                out.human += std::to_string(cycles.size()) + " minimal cycles up to length " + std::to_string(o.lmax) + "; "
                    + std::to_string(span_checked - span_failures) + "/" + std::to_string(span_checked)
                    + " of length >= 3 span (k-1) l vertices\n";
            }
            catch (const BudgetExceeded & e) {
                out.exit_code = exit_budget;
                out.stdout_json["minimal_cycles"] = "budget-exhausted";
                out.human += std::string(e.what()) + "\n";
            }
        }
        out.artifacts.emplace(out.artifacts.begin(), "out.csv", csv);
        return out;
    }

    auto run_rainbow(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        require(o.n >= 1, "--n must be at least 1");
        auto rainbow = build_rainbow_hypergraph(o.n, o.k, o.r);
        auto report = verify_degree_bounds(rainbow);
        auto rows = Json::array();
        for (auto & row : report.rows)
            rows.push_back(Json{{"l", row.ell}, {"max_degree", row.max_degree}, {"bound", format_double(row.bound)}, {"pass", row.passes}});
        out.stdout_json = Json{{"n", o.n}, {"k", o.k}, {"r", o.r}, {"vertices", report.vertices}, {"edges", report.edges},
            {"edge_lower_bound", report.edge_lower_bound}, {"vertex_degree_bound", report.vertex_degree_bound},
            {"pair_degree_bound", report.pair_degree_bound}, {"rows", rows}, {"passes", report.passes()}};
        out.artifacts.emplace_back("out.csv", degree_report_csv(report));
        if (o.export_adjacency)
            out.artifacts.emplace_back("adjacency.json", adjacency_json(rainbow).dump() + "\n");
        out.exit_code = report.passes() ? exit_holds : exit_fails;
        out.human = "R(" + std::to_string(o.n) + "," + std::to_string(o.k) + "," + std::to_string(o.r) + "): "
            + std::to_string(report.vertices) + " vertices, " + std::to_string(report.edges) + " edges, degree bounds "
            + (report.passes() ? "hold" : "FAIL") + "\n";
        return out;
    }

    auto kind_of(const std::string & name) -> EstimateKind
    {
        if (name == "point")
            return EstimateKind::point;
        if (name == "optimistic")
            return EstimateKind::optimistic;
        if (name == "pessimistic")
            return EstimateKind::pessimistic;
        throw InvalidParameter("--kind must be point, optimistic or pessimistic");
    }

    auto probes_csv(const std::vector<std::pair<Integer, Probe>> & probes) -> std::string
    {
        std::string csv = "n,p,estimate,ci_lo,ci_hi,optimistic,pessimistic,successes,failures,budget_exhausted\n";
        for (auto & [n, probe] : probes) {
            auto & o = probe.outcome;
            auto ci = o.confidence_interval();
            csv += std::to_string(n) + "," + format_double(rational_to_double(probe.p)) + ","
                + format_double(rational_to_double(o.point_estimate())) + "," + format_double(ci.lo) + "," + format_double(ci.hi) + ","
                + format_double(rational_to_double(o.optimistic_estimate())) + ","
                + format_double(rational_to_double(o.pessimistic_estimate())) + ","
                + std::to_string(o.successes) + "," + std::to_string(o.failures) + "," + std::to_string(o.budget_exhausted) + "\n";
        }
        return csv;
    }

    auto trial_records_json(const std::vector<std::pair<Integer, Probe>> & probes) -> Json
    {
        auto result = Json::array();
        for (auto & [n, probe] : probes) {
            auto records = Json::array();
            for (auto & r : probe.outcome.records)
                records.push_back(Json::array({r.trial, r.set_size, to_string(r.verdict), r.nodes_explored,
                            std::chrono::duration<double>(r.elapsed).count()}));
            result.push_back(Json{{"n", n}, {"p", to_string(probe.p)},
                    {"columns", Json::array({"trial", "set_size", "verdict", "nodes", "seconds"})}, {"records", records}});
        }
        return result;
    }

    auto threshold_json(const ThresholdResult & r) -> Json
    {
        return Json{{"kind", to_string(r.kind)}, {"p_lo", to_string(r.p_lo)}, {"p_hi", to_string(r.p_hi)},
            {"p_star", format_double(rational_to_double(r.p_star()))},
            {"estimate_lo", to_string(r.estimate_lo)}, {"estimate_hi", to_string(r.estimate_hi)}};
    }

    auto run_threshold(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        out.seed = o.seed;
        require(o.n >= 0, "--n must be non-negative");
        require(o.trials >= 1, "--trials must be positive");

        ThresholdQuery query;
        query.n = o.n;
        query.property = property_of(o, true);
        query.trials = o.trials;
        query.seed = o.seed;
        query.resolution = parse_rational(o.resolution);
        query.node_budget = budget_of(o);
        query.early_stop = o.early_stop;
        query.early_stop_batch = o.batch;
        query.threads = o.threads;
        ThresholdBisector bisector{query};

        std::vector<std::pair<Integer, Probe>> probes;
        if (! o.grid.empty()) {
            auto curve = Json::array();
            for (auto & text : o.grid) {
                auto p = parse_rational(text);
                check_probability(p);
                auto & outcome = bisector.probe(p);
                probes.emplace_back(o.n, Probe{p, outcome});
                curve.push_back(Json{{"p", to_string(p)}, {"estimate", to_string(outcome.point_estimate())},
                        {"optimistic", to_string(outcome.optimistic_estimate())}, {"pessimistic", to_string(outcome.pessimistic_estimate())}});
            }
            out.stdout_json = Json{{"property", to_string(query.property)}, {"n", o.n}, {"curve", curve}};
            out.human = "estimated " + std::to_string(probes.size()) + " grid points\n";
        }
        else {
            try {
                auto result = bisector.locate(kind_of(o.kind));
                out.stdout_json = Json{{"property", to_string(query.property)}, {"n", o.n}, {"threshold", threshold_json(result)}};
                out.human = "crossing of 1/2 in [" + to_string(result.p_lo) + ", " + to_string(result.p_hi) + "]\n";
            }
            catch (const ThresholdDiagnostic & e) {
                out.exit_code = exit_diagnostic;
                out.stdout_json = Json{{"property", to_string(query.property)}, {"n", o.n},
                    {"diagnostic", e.kind() == ThresholdDiagnostic::Kind::no_crossing ? "no-crossing" : "non-monotone"},
                    {"message", e.what()}};
                out.human = std::string("diagnostic: ") + e.what() + "\n";
            }
            for (auto & probe : bisector.probes())
                probes.emplace_back(o.n, probe);
        }
        out.artifacts.emplace_back("out.csv", probes_csv(probes));
        out.details["trials"] = trial_records_json(probes);
        return out;
    }

    auto run_scaling(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        out.seed = o.seed;
        require(! o.ns.empty(), "--ns needs at least one value");
        ScalingOptions options;
        options.trials = o.trials;
        options.seed = o.seed;
        options.resolution = parse_rational(o.resolution);
        options.node_budget = budget_of(o);
        options.early_stop = o.early_stop;
        options.threads = o.threads;

        std::vector<std::pair<Integer, Probe>> probes;
        ScalingTable table;
        try {
            table = scaling_experiment(o.k, o.ns, options);
        }
        catch (const ThresholdDiagnostic & e) {
            out.exit_code = exit_diagnostic;
            out.stdout_json = Json{{"diagnostic", e.kind() == ThresholdDiagnostic::Kind::no_crossing ? "no-crossing" : "non-monotone"},
                {"message", e.what()}};
            out.human = std::string("diagnostic: ") + e.what() + "\n";
            return out;
        }

        std::string csv = "n,kind,p_lo,p_hi,p_star,normalized\n";
        auto rows = Json::array();
        const EstimateKind kinds[] = {EstimateKind::point, EstimateKind::optimistic, EstimateKind::pessimistic};
        for (auto & row : table.rows) {
            auto j = Json{{"n", row.n}, {"budget_exhausted", row.budget_exhausted}};
            for (auto kind : kinds) {
                auto & r = row.result(kind);
                csv += std::to_string(row.n) + "," + to_string(kind) + "," + format_double(rational_to_double(r.p_lo)) + ","
                    + format_double(rational_to_double(r.p_hi)) + "," + format_double(rational_to_double(r.p_star())) + ","
                    + format_double(table.normalized(row, kind)) + "\n";
                auto t = threshold_json(r);
                t["normalized"] = format_double(table.normalized(row, kind));
                j[to_string(kind)] = t;
            }
            rows.push_back(j);
        }
        auto summary = Json::object();
        for (auto kind : kinds)
            summary[to_string(kind)] = Json{{"ratio", format_double(table.ratio(kind))}, {"within_band", table.ratio(kind) <= o.band}};
        out.stdout_json = Json{{"k", o.k}, {"trials", o.trials}, {"band", format_double(o.band)}, {"rows", rows}, {"ratio", summary}};
        out.artifacts.emplace_back("out.csv", csv);
        out.human = "normalized threshold ratio (max/min): point " + format_double(table.ratio(EstimateKind::point))
            + ", optimistic " + format_double(table.ratio(EstimateKind::optimistic))
            + ", pessimistic " + format_double(table.ratio(EstimateKind::pessimistic)) + "\n";
        return out;
    }

    auto run_search(const Options & o) -> CommandOutput
    {
        CommandOutput out;
        out.seed = o.seed;
        require(o.g >= 2, "--g must be at least 2");
        require(o.n >= 1, "--n must be at least 1");
        require(o.attempts >= 1, "--attempts must be positive");
        auto p = parse_rational(o.p);
        auto result = search_sparse_canvdw(o.k, o.g, o.n, p, o.attempts, o.seed, budget_of(o));

        std::string csv = "attempt,set_size,girth_ok,canvdw,nodes_explored\n";
        for (auto & a : result.attempts)
            csv += std::to_string(a.attempt) + "," + std::to_string(a.set_size) + "," + (a.girth_ok ? "true" : "false") + ","
                + (a.canvdw ? to_string(*a.canvdw) : std::string{"skipped"}) + "," + std::to_string(a.nodes_explored) + "\n";
        out.artifacts.emplace_back("out.csv", csv);

        out.stdout_json = Json{{"k", o.k}, {"g", o.g}, {"n", o.n}, {"p", to_string(p)}, {"attempts", result.attempts.size()},
            {"found", result.witness.has_value()}};
        if (result.witness) {
            auto & w = *result.witness;
            // revalidate with the other girth routine and an unreduced search
            auto g = girth(build_ap_hypergraph(w, o.k));
            DeciderOptions plain;
            plain.decompose = false;
            plain.order = VariableOrder::increasing;
            plain.node_budget = budget_of(o);
            auto recheck = is_can_k_vdW(w, o.k, plain);
            out.stdout_json["witness"] = to_json(w);
            out.stdout_json["validation"] = Json{{"girth", to_json(g)}, {"girth_ok", g.at_least(o.g)},
                {"canvdw", to_string(recheck.verdict)}};
            out.artifacts.emplace_back("witness.json", to_json(w).dump() + "\n");
            out.human = "witness of size " + std::to_string(w.size()) + " found at attempt " + std::to_string(result.attempts.back().attempt) + "\n";
        }
        else
            out.human = "none found in " + std::to_string(result.attempts.size()) + " attempts\n";
        return out;
    }

    using Handler = std::function<CommandOutput (const Options &)>;

    struct ParsedCommand
    {
        std::string name;
        Handler handler;
        CLI::App * app = nullptr;
    };

    /// Builds the parser. `chosen` is filled in by whichever subcommand
    /// parses.
    auto build_app(CLI::App & app, Options & o, std::vector<ParsedCommand> & commands, std::string & results_dir) -> void
    {
        app.require_subcommand(1);
        app.fallthrough();
        app.add_option("--results-dir", results_dir, "base directory for run artifacts (default: $CANVDW_RESULTS_DIR or ./results)");
        app.set_version_flag("--version", std::string(library_version));

        auto add = [&] (const std::string & name, const std::string & description, Handler handler) {
            auto sub = app.add_subcommand(name, description);
            commands.push_back(ParsedCommand{name, std::move(handler), sub});
            return sub;
        };
        auto add_property = [&] (CLI::App * sub, bool required, bool lab = false) {
            auto opt = sub->add_option("--property", o.property,
                    lab ? "canvdw, rkvdw, alpharb, alphasz, girth or size" : "canvdw, rkvdw, alpharb or alphasz");
            if (required)
                opt->required();
            sub->add_option("--k", o.k, "progression length")->capture_default_str();
            sub->add_option("--r", o.r, "palette size for rkvdw");
            sub->add_option("--alpha", o.alpha, "alpha for alpharb / alphasz, e.g. 1/2");
        };

        auto decide = add("decide", "decide a Ramsey-type property of a set", run_decide);
        decide->add_option("--set", o.set, "a..b, x,y,z, or a file")->required();
        add_property(decide, true);
        decide->add_option("--budget", o.budget, "search node budget (0: unlimited)")->capture_default_str();
        decide->add_option("--order", o.order, "smallest-domain or increasing")->capture_default_str();
        decide->add_flag("--no-decompose", o.no_decompose, "disable peeling and component splitting");
        decide->add_option("--canonical-budget", o.canonical_budget,
                "node budget for reporting the lexicographically first certificate (0: off)")->capture_default_str();

        auto verify = add("verify", "check a certificate that a property fails", run_verify);
        verify->add_option("--set", o.set, "a..b, x,y,z, or a file")->required();
        add_property(verify, true);
        verify->add_option("--certificate", o.certificate, "certificate JSON or file")->required();

        auto count = add("count", "count k-APs in [n], optionally by colour pattern", run_count);
        count->add_option("--n", o.n, "interval [n]")->required();
        count->add_option("--k", o.k, "progression length")->capture_default_str();
        count->add_option("--colouring", o.colouring, "restricted-growth colour list (JSON or file)");

        auto g = add("girth", "girth and minimal cycles of H_kAP(A)", run_girth);
        g->add_option("--set", o.set, "a..b, x,y,z, or a file")->required();
        g->add_option("--k", o.k, "progression length")->capture_default_str();
        g->add_flag("--enumerate", o.enumerate, "list minimal cycles");
        g->add_option("--lmax", o.lmax, "longest cycle to enumerate")->capture_default_str();
        g->add_option("--budget", o.budget, "enumeration node budget (0: default)")->capture_default_str();

        auto rainbow = add("rainbow", "build R(n,k,r) and check its degree bounds", run_rainbow);
        rainbow->add_option("--n", o.n, "integer range")->required();
        rainbow->add_option("--k", o.k, "progression length")->capture_default_str();
        rainbow->add_option("--r", o.r, "palette size")->required();
        rainbow->add_flag("--export-adjacency", o.export_adjacency, "write adjacency.json");

        auto add_lab = [&] (CLI::App * sub) {
            sub->add_option("--trials", o.trials, "trials per probe")->capture_default_str();
            sub->add_option("--seed", o.seed, "random seed")->capture_default_str();
            sub->add_option("--resolution", o.resolution, "final bracket width")->capture_default_str();
            sub->add_option("--budget", o.budget, "decider node budget per trial (0: unlimited)")->capture_default_str();
            sub->add_flag("--early-stop", o.early_stop, "stop probes once the interval clears 1/2");
            sub->add_option("--batch", o.batch, "early-stop batch size")->capture_default_str();
            sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->capture_default_str();
        };

        auto threshold = add("threshold", "locate the 50% crossing in p", run_threshold);
        threshold->add_option("--n", o.n, "integer range")->required();
        add_property(threshold, true, true);
        threshold->add_option("--g", o.g, "girth bound for the girth property")->capture_default_str();
        threshold->add_option("--m", o.m, "size bound for the synthetic size property")->capture_default_str();
        threshold->add_option("--kind", o.kind, "point, optimistic or pessimistic")->capture_default_str();
        threshold->add_option("--grid", o.grid, "estimate at these p instead of bisecting")->delimiter(',');
        add_lab(threshold);

        auto scaling = add("scaling", "threshold scaling across n for can-k-vdW", run_scaling);
        scaling->add_option("--k", o.k, "progression length")->capture_default_str();
        scaling->add_option("--ns", o.ns, "ascending n values, comma separated")->delimiter(',')->required();
        scaling->add_option("--band", o.band, "acceptable max/min ratio")->capture_default_str();
        add_lab(scaling);

        auto search = add("search", "sample for a can-k-vdW set with H_kAP girth >= g", run_search);
        search->add_option("--k", o.k, "progression length")->capture_default_str();
        search->add_option("--g", o.g, "girth bound")->capture_default_str();
        search->add_option("--n", o.n, "integer range")->required();
        search->add_option("--p", o.p, "sampling probability")->capture_default_str();
        search->add_option("--attempts", o.attempts, "samples to try")->capture_default_str();
        search->add_option("--seed", o.seed, "random seed")->capture_default_str();
        search->add_option("--budget", o.budget, "decider node budget (0: unlimited)")->capture_default_str();

        auto replay = app.add_subcommand("replay", "re-run a manifest and compare its outputs");
        replay->add_option("--manifest", o.manifest, "manifest.json of an earlier run")->required();
        commands.push_back(ParsedCommand{"replay", nullptr, replay});
    }

    auto flags_json(const CLI::App * sub) -> Json
    {
        auto flags = Json::object();
        for (auto opt : sub->get_options()) {
            auto name = opt->get_name(false, true);
            if (name.empty() || name == "--help" || name == "-h,--help")
                continue;
            if (opt->count() > 0) {
                auto results = opt->results();
                if (results.size() == 1)
                    flags[opt->get_lnames().empty() ? name : opt->get_lnames().front()] = results.front();
                else
                    flags[opt->get_lnames().empty() ? name : opt->get_lnames().front()] = results;
            }
            else if (! opt->get_default_str().empty())
                flags[opt->get_lnames().empty() ? name : opt->get_lnames().front()] = opt->get_default_str();
        }
        return flags;
    }

    auto stdout_text(const CommandOutput & out) -> std::string
    {
        return out.stdout_json.dump(2) + "\n";
    }

    auto output_digests(const CommandOutput & out) -> Json
    {
        auto result = Json::object();
        result["stdout"] = sha256_hex(stdout_text(out));
        for (auto & [name, content] : out.artifacts)
            result[name] = sha256_hex(content);
        return result;
    }

    auto input_digest(const std::vector<std::string> & args, const CommandOutput & out) -> std::string
    {
        std::string data;
        for (auto & a : args)
            data += a + '\0';
        for (auto & file : out.input_files)
            data += read_file(file) + '\0';
        return sha256_hex(data);
    }

    auto make_run_dir(const std::string & base, const std::string & command, std::chrono::system_clock::time_point start) -> fs::path
    {
        auto stem = fs::path{base} / "runs" / (utc_timestamp(start, "%Y%m%dT%H%M%SZ") + "-" + command);
        auto dir = stem;
        for (int i = 2 ; fs::exists(dir) ; ++i)
            dir = fs::path{stem.string() + "-" + std::to_string(i)};
        fs::create_directories(dir);
        return dir;
    }

    auto write_file(const fs::path & path, const std::string & content) -> void
    {
        std::ofstream f{path, std::ios::binary};
        f << content;
        if (! f)
            throw std::runtime_error("cannot write '" + path.string() + "'");
    }

    /// Runs a handler, mapping library errors to exit codes.
    auto execute(const Handler & handler, const Options & o) -> CommandOutput
    {
        try {
            return handler(o);
        }
        catch (const IngestError & e) {
            CommandOutput out;
            out.exit_code = exit_ingest;
            out.stdout_json = Json{{"error", "ingest"}, {"message", e.what()}};
            out.human = std::string("error: ") + e.what() + "\n";
            return out;
        }
        catch (const InvalidParameter & e) {
            CommandOutput out;
            out.exit_code = exit_usage;
            out.stdout_json = Json{{"error", "usage"}, {"message", e.what()}};
            out.human = std::string("error: ") + e.what() + "\n";
            return out;
        }
        catch (const BudgetExceeded & e) {
            CommandOutput out;
            out.exit_code = exit_budget;
            out.stdout_json = Json{{"error", "budget"}, {"message", e.what()}};
            out.human = std::string("error: ") + e.what() + "\n";
            return out;
        }
    }

    auto run_stored(const std::vector<std::string> & args, CommandOutput & out, std::string & command) -> bool
    {
        Options o;
        std::vector<ParsedCommand> commands;
        std::string ignored;
        CLI::App app{"canvdw"};
        build_app(app, o, commands, ignored);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        }
        catch (const CLI::ParseError &) {
            return false;
        }
        for (auto & c : commands)
            if (c.app->parsed() && c.handler) {
                command = c.name;
                out = execute(c.handler, o);
                return true;
            }
        return false;
    }

    auto replay(const std::string & manifest_path) -> CommandOutput
    {
        CommandOutput out;
        Json manifest;
        try {
            manifest = Json::parse(read_file(manifest_path));
        }
        catch (const nlohmann::json::exception & e) {
            throw IngestError(std::string("manifest is not valid JSON: ") + e.what());
        }
        if (! manifest.contains("args") || ! manifest.contains("outputs"))
            throw IngestError("manifest lacks args or outputs");
        auto args = manifest["args"].get<std::vector<std::string>>();

        CommandOutput rerun;
        std::string command;
        if (! run_stored(args, rerun, command))
            throw IngestError("manifest args do not parse as a command");

        auto expected = manifest["outputs"];
        auto actual = output_digests(rerun);
        auto mismatches = Json::array();
        for (auto & [name, digest] : expected.items())
            if (! actual.contains(name) || actual[name] != digest)
                mismatches.push_back(name);
        for (auto & [name, digest] : actual.items())
            if (! expected.contains(name))
                mismatches.push_back(name);
        bool same_exit = manifest.value("exit_code", -1) == rerun.exit_code;

        out.stdout_json = Json{{"command", command}, {"reproduced", mismatches.empty() && same_exit},
            {"exit_code_matches", same_exit}, {"mismatches", mismatches}};
        out.exit_code = (mismatches.empty() && same_exit) ? exit_holds : exit_fails;
        out.input_files.push_back(manifest_path);
        out.human = mismatches.empty() && same_exit ? "replay reproduced all outputs\n" : "replay differs\n";
        return out;
    }
}

auto main(int argc, char * argv[]) -> int
{
    Options o;
    std::vector<ParsedCommand> commands;
    std::string results_dir;
    CLI::App app{"canvdw: van der Waerden-type properties of sparse integer sets"};
    build_app(app, o, commands, results_dir);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::CallForAllHelp & e) {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion & e) {
        return app.exit(e);
    }
    catch (const CLI::ParseError & e) {
        app.exit(e);
        return exit_usage;
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    // the results location does not affect outputs, so replays ignore it
    for (std::size_t i = 0 ; i < args.size() ; ++i)
        if (args[i] == "--results-dir" && i + 1 < args.size()) {
            args.erase(args.begin() + std::ptrdiff_t(i), args.begin() + std::ptrdiff_t(i) + 2);
            break;
        }
        else if (args[i].rfind("--results-dir=", 0) == 0) {
            args.erase(args.begin() + std::ptrdiff_t(i));
            break;
        }

    try {
        auto start = std::chrono::system_clock::now();
        ParsedCommand * chosen = nullptr;
        for (auto & c : commands)
            if (c.app->parsed())
                chosen = &c;

        CommandOutput out;
        try {
            out = chosen->name == "replay" ? replay(o.manifest) : execute(chosen->handler, o);
        }
        catch (const IngestError & e) {
            out.exit_code = exit_ingest;
            out.stdout_json = Json{{"error", "ingest"}, {"message", e.what()}};
            out.human = std::string("error: ") + e.what() + "\n";
        }
        auto finish = std::chrono::system_clock::now();

        std::cout << stdout_text(out) << std::flush;
        std::cerr << out.human;

        if (results_dir.empty()) {
            auto env = std::getenv("CANVDW_RESULTS_DIR");
            results_dir = env && *env ? env : "results";
        }
        auto dir = make_run_dir(results_dir, chosen->name, start);
        Json outputs = output_digests(out);
        for (auto & [name, content] : out.artifacts)
            write_file(dir / name, content);

        Json manifest;
        manifest["command"] = chosen->name;
        manifest["args"] = args;
        manifest["flags"] = flags_json(chosen->app);
        manifest["seed"] = out.seed ? Json(*out.seed) : Json(nullptr);
        manifest["library_version"] = library_version;
        manifest["started_at"] = utc_timestamp(start, "%Y-%m-%dT%H:%M:%SZ");
        manifest["finished_at"] = utc_timestamp(finish, "%Y-%m-%dT%H:%M:%SZ");
        manifest["wall_clock_seconds"] = std::chrono::duration<double>(finish - start).count();
        manifest["input_digest"] = input_digest(args, out);
        manifest["exit_code"] = out.exit_code;
        manifest["outputs"] = outputs;
        auto files = Json::array();
        for (auto & [name, content] : out.artifacts)
            files.push_back((dir / name).string());
        manifest["output_files"] = files;
        manifest["details"] = out.details;
        write_file(dir / "manifest.json", manifest.dump(2) + "\n");
        std::cerr << "run directory: " << dir.string() << "\n";
        return out.exit_code;
    }
    catch (const std::exception & e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return exit_internal;
    }
}
