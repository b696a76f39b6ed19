// Command-line front end: sparsify, oracle, metrics, target.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "evsparse/pipeline.hpp"

namespace pl = evsparse::pipeline;

namespace {

void emit(const std::vector<pl::ResultRecord>& records, const std::string& out_path, const std::string& format) {
    const auto fmt = pl::parse_format(format);
    if (out_path.empty() || out_path == "-") {
        pl::write_report(std::cout, records, fmt);
    } else {
        pl::write_report(out_path, records, fmt);
    }
}

int run_sparsify(const std::string& model_path, const std::string& inputs_path, const std::string& method,
                 double tol, const std::string& out_path, const std::string& format) {
    const auto model = pl::load_model(model_path);
    const auto batch = pl::load_batch(inputs_path);
    const auto outcome = pl::run_batch(model, batch, pl::parse_method(method), tol);
    emit(outcome.records, out_path, format);

    int code = pl::kExitOk;
    for (const auto& e : outcome.errors) {
        std::cerr << "input " << e.index << " (" << e.id << "): " << e.message << '\n';
        code = std::max(code, e.exit_code);
    }
    if (!outcome.errors.empty()) {
        std::cerr << outcome.errors.size() << " of " << batch.inputs.size() << " inputs failed\n";
    }
    return code;
}

int run_oracle(const std::string& model_path, const std::string& inputs_path, std::size_t max_k) {
    const auto model = pl::load_model(model_path);
    const auto batch = pl::load_batch(inputs_path);
    const auto summary = pl::oracle_check(model, batch, max_k);

    for (const auto& row : summary.rows) {
        if (row.skipped) {
            std::printf("%s: skipped (%s)\n", row.id.c_str(), row.skipped->c_str());
            continue;
        }
        std::printf("%s: K=%zu plausibility_vs_softmax=%.3e fusion_vs_closed_form=", row.id.c_str(),
                    row.num_classes, row.plausibility_vs_softmax);
        if (row.fusion_vs_closed_form) {
            std::printf("%.3e", *row.fusion_vs_closed_form);
        } else {
            std::printf("n/a");
        }
        std::printf(" sign_mismatches=%zu\n", row.singleton_sign_mismatches);
    }
    std::printf("max plausibility deviation: %.3e\n", summary.max_plausibility_deviation);
    std::printf("max fusion deviation:       %.3e\n", summary.max_fusion_deviation);
    std::printf("singleton sign mismatches:  %zu\n", summary.total_sign_mismatches);

    const bool ok = summary.max_plausibility_deviation <= 1e-9 && summary.max_fusion_deviation <= 1e-9 &&
                    summary.total_sign_mismatches == 0;
    return ok ? pl::kExitOk : pl::kExitNumerical;
}

int run_metrics(const std::string& a_path, const std::string& b_path) {
    const auto rows = pl::compare_records(pl::read_report(a_path), pl::read_report(b_path));
    std::printf("id,wasserstein1,bhattacharyya,support_a,support_b,reduction_a,reduction_b\n");
    for (const auto& r : rows) {
        std::printf("%s,%.9g,%.9g,%zu,%zu,%.9g,%.9g\n", r.id.c_str(), r.wasserstein, r.bhattacharyya,
                    r.support_a, r.support_b, r.reduction_a, r.reduction_b);
    }
    return pl::kExitOk;
}

int run_target(const std::string& a_path, const std::string& b_path, const std::string& out_path,
               const std::string& format) {
    emit(pl::target_records(pl::read_report(a_path), pl::read_report(b_path)), out_path, format);
    return pl::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evidential sparsification of softmax latent distributions"};
    app.require_subcommand(1);

    std::string model_path, inputs_path, out_path, method = "evidential", format = "structured";
    std::string a_path, b_path;
    double tol = 1e-12;
    std::size_t max_k = 12;

    auto* sparsify = app.add_subcommand("sparsify", "Filter each input's latent distribution");
    sparsify->add_option("--model", model_path, "Model file")->required();
    sparsify->add_option("--inputs", inputs_path, "Batch file")->required();
    sparsify->add_option("--method", method, "evidential, sparsemax or softmax")
        ->check(CLI::IsMember({"evidential", "sparsemax", "softmax"}));
    sparsify->add_option("--tol", tol, "Zero-mass threshold, relative to max(1, max|w|)")
        ->check(CLI::NonNegativeNumber);
    sparsify->add_option("--out", out_path, "Output path (default stdout)");
    sparsify->add_option("--emit", format, "structured or csv")->check(CLI::IsMember({"structured", "csv"}));

    auto* oracle = app.add_subcommand("oracle", "Check closed forms against power-set enumeration");
    oracle->add_option("--model", model_path, "Model file")->required();
    oracle->add_option("--inputs", inputs_path, "Batch file")->required();
    oracle->add_option("--max-k", max_k, "Largest K to enumerate")->check(CLI::Range(1, 20));

    auto* metrics = app.add_subcommand("metrics", "Distances between two result files, paired by id");
    metrics->add_option("--a", a_path, "First result file")->required();
    metrics->add_option("--b", b_path, "Second result file")->required();

    auto* target = app.add_subcommand("target", "Target distribution from results for y and for not-y");
    target->add_option("--a", a_path, "Results conditioned on y")->required();
    target->add_option("--b", b_path, "Results conditioned on the complementary query")->required();
    target->add_option("--out", out_path, "Output path (default stdout)");
    target->add_option("--emit", format, "structured or csv")->check(CLI::IsMember({"structured", "csv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? pl::kExitOk : pl::kExitValidation;
    }

    try {
        if (*sparsify) return run_sparsify(model_path, inputs_path, method, tol, out_path, format);
        if (*oracle) return run_oracle(model_path, inputs_path, max_k);
        if (*metrics) return run_metrics(a_path, b_path);
        if (*target) return run_target(a_path, b_path, out_path, format);
    } catch (const evsparse::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pl::kExitIo;
    } catch (const evsparse::NumericalGuardError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pl::kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return pl::kExitValidation;
    }
    return pl::kExitOk;
}
