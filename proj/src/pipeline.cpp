#include "evsparse/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include "json.hpp"

#include "evsparse/baselines.hpp"
#include "evsparse/dst.hpp"
#include "evsparse/metrics.hpp"

namespace evsparse::pipeline {

namespace {

using ordered_json = nlohmann::ordered_json;

struct Line {
    std::size_t number;
    std::string key;
    std::vector<std::string> values;
};

std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> lines;
    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        std::istringstream ss(text);
        std::string key;
        if (!(ss >> key) || key.front() == '#') continue;
        Line line{number, key, {}};
        for (std::string tok; ss >> tok;) line.values.push_back(tok);
        lines.push_back(std::move(line));
    }
    return lines;
}

[[noreturn]] void fail(const std::string& source, const Line& line, const std::string& what) {
    throw ValidationError(source + ":" + std::to_string(line.number) + ": " + what);
}

double parse_real(const std::string& source, const Line& line, const std::string& tok,
                  const std::string& field) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    if (*first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) fail(source, line, field + ": cannot parse '" + tok + "'");
    if (!std::isfinite(v)) fail(source, line, field + ": non-finite value '" + tok + "'");
    return v;
}

std::size_t parse_count(const std::string& source, const Line& line, const std::string& tok,
                        const std::string& field) {
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        fail(source, line, field + ": expected a nonnegative integer, got '" + tok + "'");
    }
    return v;
}

const Line& single(const std::string& source, const std::vector<Line>& lines, const std::string& key) {
    const Line* found = nullptr;
    for (const Line& l : lines) {
        if (l.key != key) continue;
        if (found) fail(source, l, "duplicate key '" + key + "'");
        found = &l;
    }
    if (!found) throw ValidationError(source + ": missing key '" + key + "'");
    if (found->values.size() != 1) fail(source, *found, "'" + key + "' takes exactly one value");
    return *found;
}

void check_schema(const std::string& source, const std::vector<Line>& lines) {
    const Line& l = single(source, lines, "schema_version");
    if (l.values[0] != std::to_string(kSchemaVersion)) {
        fail(source, l, "unsupported schema_version '" + l.values[0] + "'");
    }
}

std::string real_text(double v, int digits) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double round_digits(double v, int digits) { return std::strtod(real_text(v, digits).c_str(), nullptr); }

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    return in;
}

std::size_t resolve_workers(std::size_t requested, std::size_t jobs) {
    std::size_t n = requested;
    if (n == 0) {
        if (const char* env = std::getenv("EVSPARSE_WORKERS")) n = std::strtoul(env, nullptr, 10);
    }
    if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
    return std::max<std::size_t>(1, std::min(n, jobs));
}

int exit_code_for(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const NumericalGuardError&) {
        return kExitNumerical;
    } catch (const IoError&) {
        return kExitIo;
    } catch (...) {
        return kExitValidation;
    }
}

std::string describe(const std::exception_ptr& e) {
    try {
        std::rethrow_exception(e);
    } catch (const std::exception& ex) {
        return ex.what();
    } catch (...) {
        return "unknown error";
    }
}

template <typename T>
std::string join(const std::vector<T>& values, int digits) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ';';
        if constexpr (std::is_floating_point_v<T>) {
            out += real_text(values[i], digits);
        } else {
            out += std::to_string(values[i]);
        }
    }
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    if (s.empty()) return out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

ordered_json to_json(const ResultRecord& r) {
    auto probs = ordered_json::array();
    for (double p : r.probs) probs.push_back(round_digits(p, 9));
    auto soft = ordered_json::array();
    for (double p : r.softmax) soft.push_back(round_digits(p, 9));
    ordered_json j;
    j["id"] = r.id;
    j["method"] = std::string(to_string(r.method));
    j["num_classes"] = r.num_classes;
    j["support"] = r.support;
    j["probs"] = probs;
    j["w"] = r.w;
    j["softmax"] = soft;
    j["vacuous_fallback"] = r.vacuous_fallback;
    j["support_size"] = r.support_size;
    j["reduction_fraction"] = r.reduction_fraction;
    return j;
}

ResultRecord from_json(const ordered_json& j) {
    ResultRecord r;
    r.id = j.at("id").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.num_classes = j.at("num_classes").get<std::size_t>();
    r.support = j.at("support").get<std::vector<std::size_t>>();
    r.probs = j.at("probs").get<std::vector<double>>();
    r.w = j.at("w").get<std::vector<double>>();
    r.softmax = j.at("softmax").get<std::vector<double>>();
    r.vacuous_fallback = j.at("vacuous_fallback").get<bool>();
    r.support_size = j.at("support_size").get<std::size_t>();
    r.reduction_fraction = j.at("reduction_fraction").get<double>();
    return r;
}

void check_record(const ResultRecord& r, const std::string& where) {
    if (r.support.size() != r.probs.size()) {
        throw ValidationError(where + ": support and probs have different lengths");
    }
    for (std::size_t i = 0; i < r.support.size(); ++i) {
        if (r.support[i] >= r.num_classes || (i > 0 && r.support[i] <= r.support[i - 1])) {
            throw ValidationError(where + ": support must be strictly increasing indices below num_classes");
        }
    }
    if (!r.softmax.empty() && r.softmax.size() != r.num_classes) {
        throw ValidationError(where + ": softmax length differs from num_classes");
    }
}

ResultRecord record_from(std::string id, Method method, const SparseDistribution& d,
                         std::vector<double> w, std::vector<double> softmax) {
    ResultRecord r;
    r.id = std::move(id);
    r.method = method;
    r.num_classes = d.num_classes;
    r.support = d.support;
    r.probs = d.probs;
    r.w = std::move(w);
    r.softmax = std::move(softmax);
    r.vacuous_fallback = d.vacuous_fallback;
    const auto stats = metrics::support_stats(d);
    r.support_size = stats.size;
    r.reduction_fraction = stats.reduction_fraction;
    return r;
}

}  // namespace

std::string_view to_string(Method m) {
    switch (m) {
        case Method::evidential: return "evidential";
        case Method::sparsemax: return "sparsemax";
        case Method::softmax: return "softmax";
        case Method::target: return "target";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    if (name == "evidential") return Method::evidential;
    if (name == "sparsemax") return Method::sparsemax;
    if (name == "softmax") return Method::softmax;
    if (name == "target") return Method::target;
    throw ValidationError("unknown method '" + std::string(name) + "'");
}

ReportFormat parse_format(std::string_view name) {
    if (name == "structured") return ReportFormat::structured;
    if (name == "csv") return ReportFormat::csv;
    throw ValidationError("unknown report format '" + std::string(name) + "'");
}

SparseDistribution ResultRecord::distribution() const {
    return SparseDistribution{num_classes, support, probs, vacuous_fallback};
}

evidential::LastLayerParams parse_model(std::istream& in, const std::string& source) {
    const std::vector<Line> lines = tokenize(in);
    check_schema(source, lines);
    const Line& k_line = single(source, lines, "K");
    const Line& j_line = single(source, lines, "J");
    const std::size_t K = parse_count(source, k_line, k_line.values[0], "K");
    const std::size_t J = parse_count(source, j_line, j_line.values[0], "J");
    if (K < 2) fail(source, k_line, "K must be at least 2");
    if (J < 1) fail(source, j_line, "J must be at least 1");

    evidential::LastLayerParams model{Matrix(K, J), {}, {}};
    std::vector<bool> seen(K, false);
    bool have_bias = false;
    bool have_labels = false;
    for (const Line& l : lines) {
        if (l.key == "schema_version" || l.key == "K" || l.key == "J") continue;
        if (l.key == "bias") {
            if (have_bias) fail(source, l, "duplicate key 'bias'");
            have_bias = true;
            if (l.values.size() != K) {
                fail(source, l, "bias has " + std::to_string(l.values.size()) + " values, expected K = " +
                                    std::to_string(K));
            }
            for (std::size_t k = 0; k < K; ++k) {
                model.bias.push_back(parse_real(source, l, l.values[k], "bias[" + std::to_string(k) + "]"));
            }
        } else if (l.key == "weights") {
            if (l.values.empty()) fail(source, l, "weights line needs a row index");
            const std::size_t row = parse_count(source, l, l.values[0], "weights row index");
            if (row >= K) fail(source, l, "weights row " + std::to_string(row) + " out of range");
            if (seen[row]) fail(source, l, "weights row " + std::to_string(row) + " given twice");
            seen[row] = true;
            if (l.values.size() - 1 != J) {
                fail(source, l, "weights row " + std::to_string(row) + " has " +
                                    std::to_string(l.values.size() - 1) + " values, expected J = " +
                                    std::to_string(J));
            }
            for (std::size_t j = 0; j < J; ++j) {
                model.weights(row, j) = parse_real(
                    source, l, l.values[j + 1],
                    "weights[" + std::to_string(row) + "][" + std::to_string(j) + "]");
            }
        } else if (l.key == "class_labels") {
            if (have_labels) fail(source, l, "duplicate key 'class_labels'");
            have_labels = true;
            if (l.values.size() != K) fail(source, l, "class_labels needs K = " + std::to_string(K) + " entries");
            model.class_labels = l.values;
        } else {
            fail(source, l, "unknown key '" + l.key + "'");
        }
    }
    if (!have_bias) throw ValidationError(source + ": missing key 'bias'");
    for (std::size_t k = 0; k < K; ++k) {
        if (!seen[k]) throw ValidationError(source + ": missing weights row " + std::to_string(k));
    }
    return model;
}

evidential::LastLayerParams load_model(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_model(in, path.string());
}

void write_model(std::ostream& out, const evidential::LastLayerParams& model) {
    evidential::validate(model);
    out << "schema_version " << kSchemaVersion << '\n';
    out << "K " << model.num_classes() << '\n';
    out << "J " << model.num_features() << '\n';
    if (!model.class_labels.empty()) {
        out << "class_labels";
        for (const auto& s : model.class_labels) out << ' ' << s;
        out << '\n';
    }
    out << "bias";
    for (double b : model.bias) out << ' ' << real_text(b, 17);
    out << '\n';
    for (std::size_t k = 0; k < model.num_classes(); ++k) {
        out << "weights " << k;
        for (double v : model.weights.row(k)) out << ' ' << real_text(v, 17);
        out << '\n';
    }
}

Batch parse_batch(std::istream& in, const std::string& source) {
    const std::vector<Line> lines = tokenize(in);
    check_schema(source, lines);
    const Line& j_line = single(source, lines, "J");
    Batch batch;
    batch.num_features = parse_count(source, j_line, j_line.values[0], "J");
    if (batch.num_features < 1) fail(source, j_line, "J must be at least 1");

    std::set<std::string> ids;
    for (const Line& l : lines) {
        if (l.key == "schema_version" || l.key == "J") continue;
        if (l.key != "input") fail(source, l, "unknown key '" + l.key + "'");
        if (l.values.empty()) fail(source, l, "input line needs an id");
        const std::string& id = l.values[0];
        if (!ids.insert(id).second) fail(source, l, "duplicate input id '" + id + "'");
        if (l.values.size() - 1 != batch.num_features) {
            fail(source, l, "input '" + id + "' has " + std::to_string(l.values.size() - 1) +
                                " features, expected J = " + std::to_string(batch.num_features));
        }
        FeatureInput input{id, {}};
        for (std::size_t j = 0; j < batch.num_features; ++j) {
            input.features.push_back(
                parse_real(source, l, l.values[j + 1], id + ".features[" + std::to_string(j) + "]"));
        }
        batch.inputs.push_back(std::move(input));
    }
    return batch;
}

Batch load_batch(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_batch(in, path.string());
}

void write_batch(std::ostream& out, const Batch& batch) {
    out << "schema_version " << kSchemaVersion << '\n';
    out << "J " << batch.num_features << '\n';
    for (const auto& input : batch.inputs) {
        out << "input " << input.id;
        for (double v : input.features) out << ' ' << real_text(v, 17);
        out << '\n';
    }
}

ResultRecord evaluate(const evidential::LastLayerParams& model, const FeatureInput& input,
                      Method method, double relative_tol) {
    const std::vector<double> z = evidential::logits(model, input.features);
    const evidential::EvidentialWeights ew =
        evidential::evidential_weights(evidential::center_params(model), input.features);
    const Distribution soft = evidential::softmax(z);

    SparseDistribution d;
    switch (method) {
        case Method::evidential: {
            if (!(relative_tol >= 0.0)) throw ValidationError("tolerance must be nonnegative");
            double scale = 1.0;
            for (double v : ew.w) scale = std::max(scale, std::abs(v));
            const double tol = relative_tol * scale;
            d = evidential::filter_distribution(soft, evidential::singleton_mass_signs(ew, tol));
            break;
        }
        case Method::sparsemax: d = baselines::sparsemax(z); break;
        case Method::softmax: d = evidential::to_sparse(soft); break;
        case Method::target: throw ValidationError("target records are built from result pairs, not inputs");
    }
    return record_from(input.id, method, d, ew.w, soft.probs);
}

BatchOutcome run_batch(const evidential::LastLayerParams& model, const Batch& batch, Method method,
                       double relative_tol, std::size_t workers) {
    evidential::validate(model);
    if (batch.num_features != model.num_features()) {
        throw ValidationError("batch has J = " + std::to_string(batch.num_features) + ", model has J = " +
                              std::to_string(model.num_features()));
    }
    const std::size_t n = batch.inputs.size();
    BatchOutcome outcome;
    if (n == 0) return outcome;

    std::vector<std::variant<ResultRecord, std::exception_ptr>> slots(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            try {
                slots[i] = evaluate(model, batch.inputs[i], method, relative_tol);
            } catch (...) {
                slots[i] = std::current_exception();
            }
        }
    };

    const std::size_t num_workers = resolve_workers(workers, n);
    if (num_workers == 1) {
        work(0, n);
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (n + num_workers - 1) / num_workers;
        for (std::size_t begin = 0; begin < n; begin += chunk) {
            pool.emplace_back(work, begin, std::min(n, begin + chunk));
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (auto* r = std::get_if<ResultRecord>(&slots[i])) {
            outcome.records.push_back(std::move(*r));
        } else {
            const auto& e = std::get<std::exception_ptr>(slots[i]);
            outcome.errors.push_back({i, batch.inputs[i].id, describe(e), exit_code_for(e)});
        }
    }
    return outcome;
}

std::string csv_header() {
    return "id,method,num_classes,support_size,reduction_fraction,vacuous_fallback,support,probs,w,softmax";
}

void write_report(std::ostream& out, const std::vector<ResultRecord>& records, ReportFormat format) {
    if (format == ReportFormat::structured) {
        ordered_json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["records"] = ordered_json::array();
        for (const auto& r : records) doc["records"].push_back(to_json(r));
        out << doc.dump(2) << '\n';
        return;
    }
    out << csv_header() << '\n';
    for (const auto& r : records) {
        out << csv_escape(r.id) << ',' << to_string(r.method) << ',' << r.num_classes << ','
            << r.support_size << ',' << real_text(r.reduction_fraction, 17) << ','
            << (r.vacuous_fallback ? "true" : "false") << ',' << join(r.support, 0) << ','
            << join(r.probs, 9) << ',' << join(r.w, 17) << ',' << join(r.softmax, 9) << '\n';
    }
}

void write_report(const std::filesystem::path& path, const std::vector<ResultRecord>& records,
                  ReportFormat format) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    write_report(out, records, format);
    out.flush();
    if (!out) throw IoError("write to '" + path.string() + "' failed");
}

std::vector<ResultRecord> parse_report(std::istream& in, const std::string& source) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    const auto first = text.find_first_not_of(" \t\r\n");
    std::vector<ResultRecord> records;
    if (first == std::string::npos) throw ValidationError(source + ": empty report");

    if (text[first] == '{') {
        ordered_json doc;
        try {
            doc = ordered_json::parse(text);
            if (doc.at("schema_version").get<int>() != kSchemaVersion) {
                throw ValidationError(source + ": unsupported schema_version");
            }
            for (const auto& j : doc.at("records")) records.push_back(from_json(j));
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(source + ": " + e.what());
        }
    } else {
        std::istringstream lines(text);
        std::string line;
        std::getline(lines, line);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line != csv_header()) throw ValidationError(source + ": unexpected CSV header");
        std::size_t number = 1;
        while (std::getline(lines, line)) {
            ++number;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            const auto f = csv_fields(line);
            const std::string where = source + ":" + std::to_string(number);
            if (f.size() != 10) throw ValidationError(where + ": expected 10 fields");
            ResultRecord r;
            try {
                r.id = f[0];
                r.method = parse_method(f[1]);
                r.num_classes = std::stoul(f[2]);
                r.support_size = std::stoul(f[3]);
                r.reduction_fraction = std::stod(f[4]);
                r.vacuous_fallback = f[5] == "true";
                for (const auto& s : split(f[6], ';')) r.support.push_back(std::stoul(s));
                for (const auto& s : split(f[7], ';')) r.probs.push_back(std::stod(s));
                for (const auto& s : split(f[8], ';')) r.w.push_back(std::stod(s));
                for (const auto& s : split(f[9], ';')) r.softmax.push_back(std::stod(s));
            } catch (const std::logic_error&) {
                throw ValidationError(where + ": malformed field");
            }
            records.push_back(std::move(r));
        }
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
        check_record(records[i], source + ": record " + std::to_string(i));
    }
    return records;
}

std::vector<ResultRecord> read_report(const std::filesystem::path& path) {
    auto in = open_in(path);
    return parse_report(in, path.string());
}

std::vector<ResultRecord> target_records(const std::vector<ResultRecord>& a,
                                         const std::vector<ResultRecord>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("target needs equally many records, got " + std::to_string(a.size()) +
                              " and " + std::to_string(b.size()));
    }
    std::vector<ResultRecord> out;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].softmax.empty() || b[i].softmax.empty()) {
            throw ValidationError("record " + std::to_string(i) + " has no softmax field");
        }
        const SparseDistribution t =
            metrics::target_distribution(Distribution{a[i].softmax}, Distribution{b[i].softmax});
        out.push_back(record_from(a[i].id, Method::target, t, a[i].w, a[i].softmax));
    }
    return out;
}

std::vector<DistanceRow> compare_records(const std::vector<ResultRecord>& a,
                                         const std::vector<ResultRecord>& b) {
    std::map<std::string, const ResultRecord*> by_id;
    for (const auto& r : b) by_id[r.id] = &r;
    std::vector<DistanceRow> rows;
    for (const auto& ra : a) {
        const auto it = by_id.find(ra.id);
        if (it == by_id.end()) continue;
        const ResultRecord& rb = *it->second;
        if (ra.num_classes != rb.num_classes) {
            throw ValidationError("record '" + ra.id + "' has different class counts in the two reports");
        }
        const SparseDistribution da = ra.distribution();
        const SparseDistribution db = rb.distribution();
        const auto sa = metrics::support_stats(da);
        const auto sb = metrics::support_stats(db);
        rows.push_back({ra.id, metrics::wasserstein1(da, db), metrics::bhattacharyya(da, db), sa.size,
                        sb.size, sa.reduction_fraction, sb.reduction_fraction});
    }
    return rows;
}

OracleSummary oracle_check(const evidential::LastLayerParams& model, const Batch& batch,
                           std::size_t max_k) {
    evidential::validate(model);
    if (batch.num_features != model.num_features()) {
        throw ValidationError("batch has J = " + std::to_string(batch.num_features) + ", model has J = " +
                              std::to_string(model.num_features()));
    }
    const std::size_t K = model.num_classes();
    const std::size_t J = model.num_features();
    const evidential::CenteredParams centered = evidential::center_params(model);

    OracleSummary summary;
    for (const auto& input : batch.inputs) {
        OracleRow row{input.id, K, std::nullopt, 0.0, std::nullopt, 0};
        if (K > max_k || K > dst::kMaxPowerSetClasses) {
            row.skipped = "K = " + std::to_string(K) + " exceeds max-k " + std::to_string(max_k);
            summary.rows.push_back(row);
            continue;
        }
        const auto ew = evidential::evidential_weights(centered, input.features);
        const auto closed = dst::closed_form_mass(ew);
        const auto soft = evidential::softmax(evidential::logits(model, input.features));
        const auto plaus = dst::plausibility_transform(closed.mass);
        for (std::size_t k = 0; k < K; ++k) {
            row.plausibility_vs_softmax =
                std::max(row.plausibility_vs_softmax, std::abs(plaus.probs[k] - soft.probs[k]));
        }

        if (K <= dst::kMaxFusionClasses && J <= dst::kMaxFusionFeatures) {
            const auto fused = dst::fuse_feature_masses(evidential::per_feature_weights(centered, input.features));
            double dev = 0.0;
            for (dst::Subset s = 0; s < fused.size(); ++s) dev = std::max(dev, std::abs(fused[s] - closed.mass[s]));
            row.fusion_vs_closed_form = dev;
            summary.max_fusion_deviation = std::max(summary.max_fusion_deviation, dev);
        }

        const auto report = evidential::singleton_mass_signs(ew, evidential::default_tolerance(ew));
        const auto singles = dst::singleton_masses(closed.mass);
        for (std::size_t k = 0; k < K; ++k) {
            if (report.keep_mask[k] != (singles[k] > 0.0)) ++row.singleton_sign_mismatches;
        }
        summary.max_plausibility_deviation =
            std::max(summary.max_plausibility_deviation, row.plausibility_vs_softmax);
        summary.total_sign_mismatches += row.singleton_sign_mismatches;
        summary.rows.push_back(row);
    }
    return summary;
}

}  // namespace evsparse::pipeline
