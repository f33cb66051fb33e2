// coupling-forge command line: counting, label tables, pivot-mass sweeps,
// coupling construction/verification, and coupled sampling.
//
// Exit codes: 0 success, 2 configuration error, 3 infeasible (cut
// certificate written), 4 size guard, 5 verification or sampling failure.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "coupling_forge/coupling_forge.hpp"

namespace cf = coupling_forge;

namespace {

struct SpecOpts {
    std::string preset;
    std::string spec_file;
    int n = 0;
};

struct OutputOpts {
    std::string format = "json";
    std::string output;  // empty = stdout
};

void add_spec_options(CLI::App* cmd, SpecOpts& opts) {
    auto* preset = cmd->add_option("--preset", opts.preset,
                                   "built-in family: permutations, set_partitions, "
                                   "integer_partitions, distinct_partitions");
    cmd->add_option("--n", opts.n, "total size n (used with --preset)");
    auto* file = cmd->add_option("--spec", opts.spec_file, "spec JSON file");
    preset->excludes(file);
}

void add_output_options(CLI::App* cmd, OutputOpts& opts) {
    cmd->add_option("--format", opts.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--output,-o", opts.output, "output path (default: stdout)");
}

cf::StructureSpec resolve_spec(const SpecOpts& opts) {
    if (!opts.spec_file.empty()) return cf::load_spec_file(opts.spec_file);
    if (!opts.preset.empty()) {
        if (opts.n < 1) throw std::invalid_argument("--preset requires --n >= 1");
        return cf::StructureSpec::preset(opts.preset, opts.n);
    }
    throw std::invalid_argument("provide either --preset with --n, or --spec FILE");
}

void emit(const std::string& content, const OutputOpts& opts) {
    if (opts.output.empty() || opts.output == "-")
        std::cout << content;
    else
        cf::write_text_file(opts.output, content);
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::vector<double> parse_x_list(const std::string& arg) {
    std::vector<double> xs;
    std::stringstream ss(arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(tok, &used);
        if (used != tok.size()) throw std::invalid_argument("bad x value: " + tok);
        xs.push_back(v);
    }
    if (xs.empty()) throw std::invalid_argument("--x needs at least one value");
    return xs;
}

int cmd_count(const SpecOpts& sopts, const OutputOpts& oopts) {
    const cf::StructureSpec spec = resolve_spec(sopts);
    const cf::BigInt kn = cf::count_structures(spec);
    if (oopts.format == "csv") {
        emit("k_n\r\n" + kn.str() + "\r\n", oopts);
    } else {
        nlohmann::json j = cf::spec_to_json(spec);
        j["k_n"] = cf::bigint_to_json(kn);
        emit(dump(j), oopts);
    }
    return 0;
}

int cmd_labels(const SpecOpts& sopts, const OutputOpts& oopts) {
    const cf::StructureSpec spec = resolve_spec(sopts);
    const auto dist = cf::component_distribution(spec);
    if (oopts.format == "csv") {
        emit(cf::labels_to_csv(dist), oopts);
        return 0;
    }
    nlohmann::json j = cf::spec_to_json(spec);
    j["k_n"] = cf::bigint_to_json(cf::count_structures(spec));
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [label, prob] : dist)
        rows.push_back({{"a", label.a},
                        {"multiplicity", cf::bigint_to_json(label.multiplicity)},
                        {"probability", prob}});
    j["labels"] = rows;
    emit(dump(j), oopts);
    return 0;
}

int cmd_pivot_mass(const SpecOpts& sopts, const OutputOpts& oopts, const std::string& xs_arg) {
    const cf::StructureSpec spec = resolve_spec(sopts);
    const std::vector<double> xs = parse_x_list(xs_arg);
    const std::vector<cf::ColumnLabel> labels = cf::enumerate_column_labels(spec);
    std::vector<cf::PivotMassReport> reports;
    for (double x : xs) {
        const cf::ProcessFamily fam(spec, x);
        reports.push_back(cf::pivot_mass_report(fam, labels));
    }
    if (oopts.format == "csv") {
        emit(cf::pivot_sweep_to_csv(reports), oopts);
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const cf::PivotMassReport& rep : reports) arr.push_back(cf::to_json(rep));
        emit(dump(arr), oopts);
    }
    return 0;
}

int cmd_couple(const SpecOpts& sopts, const std::string& x_arg, const std::string& output,
               double tol, std::size_t max_classes, std::size_t max_pairs) {
    const auto t0 = std::chrono::steady_clock::now();
    const cf::StructureSpec spec = resolve_spec(sopts);
    const char* cache_env = std::getenv("COUPLING_FORGE_CACHE");
    const std::string cache_dir = cache_env ? cache_env : "";

    double x;
    std::optional<cf::ThresholdResult> threshold;
    if (x_arg == "auto") {
        try {
            threshold = cf::find_threshold_x(spec);
            x = threshold->x;
        } catch (const cf::ThresholdSearchError& e) {
            // Let the flow solve be the judge at the best tilt found.
            std::cerr << "threshold search exhausted (best max mass " << e.best_mass
                      << " at x=" << e.best_x << "); trying the solver there\n";
            x = e.best_x;
        }
    } else {
        std::size_t used = 0;
        x = std::stod(x_arg, &used);
        if (used != x_arg.size()) throw std::invalid_argument("bad --x value: " + x_arg);
    }

    const cf::ProcessFamily fam(spec, x);
    const auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    std::optional<cf::CouplingTable> table;
    bool from_cache = false;
    if (!cache_dir.empty()) {
        if (auto cached = cf::load_table_cache(spec, x, cache_dir)) {
            table = std::move(*cached);
            from_cache = true;
        }
    }
    if (!table) {
        cf::CouplingLimits limits;
        limits.max_classes = max_classes;
        limits.max_pairs = max_pairs;
        cf::CouplingOutcome outcome = cf::construct_coupling(fam, limits);
        if (std::holds_alternative<cf::CutCertificate>(outcome)) {
            const cf::CutCertificate& cert = std::get<cf::CutCertificate>(outcome);
            const std::string path = output.empty() ? "cut_certificate.json" : output;
            cf::write_text_file(path, dump(cf::to_json(cert)));
            std::cout << "infeasible at x=" << x << ": cut of " << cert.labels.size()
                      << " label(s), nu_L=" << cert.nu_L
                      << " > mu_reachable=" << cert.mu_reachable << " (gap " << cert.gap()
                      << "), flow=" << cert.flow_value << ", wall=" << elapsed() << "s\n"
                      << "wrote " << path << "\n";
            return 3;
        }
        table = std::move(std::get<cf::CouplingTable>(outcome));
    }

    cf::VerificationReport rep = cf::verify_coupling(*table, fam, tol, max_classes);
    if (!rep.passed) {
        std::cerr << "coupling failed verification: " << dump(cf::to_json(rep));
        return 5;
    }
    if (!cache_dir.empty() && !from_cache) cf::store_table_cache(*table, cache_dir);
    const std::string path = output.empty() ? "coupling_table.json" : output;
    cf::write_text_file(path, dump(cf::table_to_json(*table)));
    std::cout << "coupled at x=" << x << (threshold ? " (auto)" : "")
              << (from_cache ? " [cache]" : "") << ": flow=" << table->flow_value
              << ", entries=" << table->entries.size()
              << ", max row residual=" << rep.max_row_residual
              << ", max col residual=" << rep.max_col_residual << ", wall=" << elapsed()
              << "s\n"
              << "wrote " << path << "\n";
    return 0;
}

int cmd_verify(const std::string& table_path, double tol) {
    cf::CouplingTable table;
    try {
        table = cf::load_table_file(table_path);
    } catch (const std::exception& e) {
        std::cerr << "table rejected: " << e.what() << "\n";
        return 5;
    }
    const cf::ProcessFamily fam(table.spec, table.x);
    const cf::VerificationReport rep = cf::verify_coupling(table, fam, tol);
    std::cout << dump(cf::to_json(rep));
    return rep.passed ? 0 : 5;
}

int cmd_sample(const std::string& table_path, long long count, std::uint64_t seed) {
    cf::CouplingTable table;
    try {
        table = cf::load_table_file(table_path);
    } catch (const std::exception& e) {
        std::cerr << "table rejected: " << e.what() << "\n";
        return 5;
    }
    const cf::ProcessFamily fam(table.spec, table.x);
    const cf::VerificationReport rep = cf::verify_coupling(table, fam);
    if (!rep.passed) {
        std::cerr << "table failed verification: " << rep.first_violation << "\n";
        return 5;
    }
    cf::CoupledSampler sampler(table, fam, seed);
    for (long long s = 0; s < count; ++s) {
        cf::CoupledSampler::Sample smp;
        try {
            smp = sampler.next();
        } catch (const std::logic_error& e) {
            std::cerr << "sampling aborted: " << e.what() << "\n";
            return 5;
        }
        nlohmann::json line = {{"z", smp.z}, {"label", table.labels[smp.label_index].a}};
        std::cout << line.dump() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"component-count distributions and explicit couplings for assemblies, "
                 "multisets, and selections"};
    app.require_subcommand(1);

    SpecOpts sopts;
    OutputOpts oopts;

    CLI::App* count = app.add_subcommand("count", "print k_n, the number of objects");
    add_spec_options(count, sopts);
    add_output_options(count, oopts);

    CLI::App* labels =
        app.add_subcommand("labels", "list component vectors with multiplicities");
    add_spec_options(labels, sopts);
    add_output_options(labels, oopts);

    std::string xs_arg;
    CLI::App* pivot =
        app.add_subcommand("pivot-mass", "per-column pivot masses over an x grid");
    add_spec_options(pivot, sopts);
    add_output_options(pivot, oopts);
    pivot->add_option("--x", xs_arg, "tilt values, comma separated")->required();

    std::string couple_x = "auto";
    std::string couple_output;
    double couple_tol = 1e-8;
    std::size_t max_classes = 10'000'000;
    std::size_t max_pairs = 30'000'000;
    CLI::App* couple =
        app.add_subcommand("couple", "construct a coupling table or a cut certificate");
    add_spec_options(couple, sopts);
    couple->add_option("--x", couple_x, "tilt value, or 'auto' to search for one");
    couple->add_option("--output,-o", couple_output, "artifact path");
    couple->add_option("--tol", couple_tol, "verification tolerance");
    couple->add_option("--max-classes", max_classes, "row class count guard");
    couple->add_option("--max-pairs", max_pairs, "class x label cell guard");

    std::string table_path;
    double verify_tol = 1e-8;
    CLI::App* verify = app.add_subcommand("verify", "verify a coupling table file");
    verify->add_option("--table", table_path, "table JSON file")->required();
    verify->add_option("--tol", verify_tol, "tolerance");

    long long sample_count = 10;
    std::uint64_t seed = 12345;
    CLI::App* sample = app.add_subcommand("sample", "stream coupled (row, label) pairs");
    sample->add_option("--table", table_path, "table JSON file")->required();
    sample->add_option("--count", sample_count, "number of pairs");
    sample->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (count->parsed()) return cmd_count(sopts, oopts);
        if (labels->parsed()) return cmd_labels(sopts, oopts);
        if (pivot->parsed()) return cmd_pivot_mass(sopts, oopts, xs_arg);
        if (couple->parsed())
            return cmd_couple(sopts, couple_x, couple_output, couple_tol, max_classes,
                              max_pairs);
        if (verify->parsed()) return cmd_verify(table_path, verify_tol);
        if (sample->parsed()) return cmd_sample(table_path, sample_count, seed);
    } catch (const cf::SizeLimitError& e) {
        std::cerr << "size guard: " << e.what() << " (requested " << e.requested
                  << ", limit " << e.limit << ")\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
