#pragma once

// File formats, the batch runner and report emission.
//
// Model and batch files are line-oriented text. Blank lines and lines
// starting with '#' are ignored; every other line is a key followed by
// whitespace-separated values:
//
//   schema_version 1          schema_version 1
//   K 2                       J 1
//   J 1                       input q0 2.0
//   class_labels a b          input q1 -0.5
//   bias 0.5 -0.5
//   weights 0 1.0             (one "weights <row> <J values>" line per class)
//   weights 1 -1.0
//
// Result reports are JSON ("structured") or CSV.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evsparse/evidential.hpp"
#include "evsparse/types.hpp"

namespace evsparse::pipeline {

inline constexpr int kSchemaVersion = 1;

struct FeatureInput {
    std::string id;
    std::vector<double> features;
};

struct Batch {
    std::size_t num_features = 0;
    std::vector<FeatureInput> inputs;
};

enum class Method { evidential, sparsemax, softmax, target };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

struct ResultRecord {
    std::string id;
    Method method = Method::evidential;
    std::size_t num_classes = 0;
    std::vector<std::size_t> support;
    std::vector<double> probs;
    std::vector<double> w;
    std::vector<double> softmax;
    bool vacuous_fallback = false;
    std::size_t support_size = 0;
    double reduction_fraction = 0.0;

    SparseDistribution distribution() const;
};

// Failure on a single batch input; the rest of the batch still runs.
struct InputError {
    std::size_t index = 0;
    std::string id;
    std::string message;
    int exit_code = 1;
};

struct BatchOutcome {
    std::vector<ResultRecord> records;  // input order, failed inputs omitted
    std::vector<InputError> errors;
};

enum class ReportFormat { structured, csv };

ReportFormat parse_format(std::string_view name);

// Exit codes shared by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitIo = 3;

evidential::LastLayerParams parse_model(std::istream& in, const std::string& source = "<model>");
evidential::LastLayerParams load_model(const std::filesystem::path& path);
void write_model(std::ostream& out, const evidential::LastLayerParams& model);

Batch parse_batch(std::istream& in, const std::string& source = "<batch>");
Batch load_batch(const std::filesystem::path& path);
void write_batch(std::ostream& out, const Batch& batch);

/// Builds the record for one input. For the evidential method the zero-mass
/// threshold is relative_tol * max(1, max|w|).
ResultRecord evaluate(const evidential::LastLayerParams& model, const FeatureInput& input,
                      Method method, double relative_tol);

/// Runs every input, fanning out over worker threads. workers == 0 picks
/// EVSPARSE_WORKERS from the environment or the hardware concurrency.
/// Output is ordered by input index and independent of the worker count.
BatchOutcome run_batch(const evidential::LastLayerParams& model, const Batch& batch, Method method,
                       double relative_tol = 1e-12, std::size_t workers = 0);

// Exact field order and 9 significant digits for probabilities.
void write_report(std::ostream& out, const std::vector<ResultRecord>& records, ReportFormat format);
void write_report(const std::filesystem::path& path, const std::vector<ResultRecord>& records,
                  ReportFormat format);

// Accepts either report format.
std::vector<ResultRecord> parse_report(std::istream& in, const std::string& source = "<report>");
std::vector<ResultRecord> read_report(const std::filesystem::path& path);

std::string csv_header();

/// Target distribution for each positional pair (a[i], b[i]) of result
/// records, built from their softmax fields. Output ids follow a.
std::vector<ResultRecord> target_records(const std::vector<ResultRecord>& a,
                                         const std::vector<ResultRecord>& b);

struct DistanceRow {
    std::string id;
    double wasserstein = 0.0;
    double bhattacharyya = 0.0;
    std::size_t support_a = 0;
    std::size_t support_b = 0;
    double reduction_a = 0.0;
    double reduction_b = 0.0;
};

// Pairs records by id; ids present in only one list are skipped.
std::vector<DistanceRow> compare_records(const std::vector<ResultRecord>& a,
                                         const std::vector<ResultRecord>& b);

struct OracleRow {
    std::string id;
    std::size_t num_classes = 0;
    std::optional<std::string> skipped;  // reason, when the oracle was not run
    double plausibility_vs_softmax = 0.0;
    std::optional<double> fusion_vs_closed_form;  // absent when J exceeds the fusion budget
    std::size_t singleton_sign_mismatches = 0;
};

struct OracleSummary {
    std::vector<OracleRow> rows;
    double max_plausibility_deviation = 0.0;
    double max_fusion_deviation = 0.0;
    std::size_t total_sign_mismatches = 0;
};

/// Checks the closed-form masses, the fused simple masses, the plausibility
/// transform and the sign-only filter against each other on every input with
/// K <= max_k.
OracleSummary oracle_check(const evidential::LastLayerParams& model, const Batch& batch,
                           std::size_t max_k);

}  // namespace evsparse::pipeline
