#include "sngeo/experiment.hpp"

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

namespace sngeo {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_real(v[i]);
    }
    return out;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& s, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (...) {
            throw config_error("bad numeric list in " + where + ": " + s);
        }
    }
    if (out.empty()) throw config_error("empty list in " + where);
    return out;
}

// Flat section.key -> value map, from the text format or JSON.
std::map<std::string, std::string> flatten(const std::string& text) {
    std::map<std::string, std::string> kv;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        ordered_json j = ordered_json::parse(text);
        for (auto& [section, body] : j.items()) {
            if (!body.is_object())
                throw config_error("config section " + section + " must be an object");
            for (auto& [key, value] : body.items()) {
                std::string sv;
                if (value.is_string())
                    sv = value.get<std::string>();
                else if (value.is_array()) {
                    for (std::size_t i = 0; i < value.size(); ++i) {
                        if (i) sv += ",";
                        sv += fmt_real(value[i].get<double>());
                    }
                } else if (value.is_number_integer())
                    sv = std::to_string(value.get<std::int64_t>());
                else if (value.is_number())
                    sv = fmt_real(value.get<double>());
                else if (value.is_boolean())
                    sv = value.get<bool>() ? "1" : "0";
                else
                    throw config_error("unsupported value for " + section + "." + key);
                kv[section + "." + key] = sv;
            }
        }
        return kv;
    }
    std::stringstream ss(text);
    std::string line, section;
    while (std::getline(ss, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("config line without '=': " + line);
        const std::string key = trim(line.substr(0, eq));
        if (section.empty()) throw config_error("key before any [section]: " + key);
        kv[section + "." + key] = trim(line.substr(eq + 1));
    }
    return kv;
}

struct Reader {
    std::map<std::string, std::string> kv;
    std::map<std::string, bool> consumed;

    bool has(const std::string& key) const { return kv.count(key) > 0; }

    std::string str(const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed[key] = true;
        return it->second;
    }
    double real(const std::string& key, double fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed[key] = true;
        try {
            return std::stod(it->second);
        } catch (...) {
            throw config_error("bad number for " + key + ": " + it->second);
        }
    }
    std::int64_t integer(const std::string& key, std::int64_t fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed[key] = true;
        try {
            return std::stoll(it->second);
        } catch (...) {
            throw config_error("bad integer for " + key + ": " + it->second);
        }
    }
    std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed[key] = true;
        try {
            return std::stoull(it->second);
        } catch (...) {
            throw config_error("bad integer for " + key + ": " + it->second);
        }
    }
    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        consumed[key] = true;
        return parse_list(it->second, key);
    }
    void finish() const {
        for (const auto& [key, value] : kv)
            if (!consumed.count(key)) throw config_error("unknown config key: " + key);
    }
};

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
    Reader r{flatten(text), {}};
    ExperimentConfig c;
    if (!r.has("run.seed")) throw config_error("missing field: run.seed");
    c.seed = r.uinteger("run.seed", 0);
    c.dim = static_cast<int>(r.integer("run.dim", c.dim));
    c.threads = static_cast<int>(r.integer("run.threads", c.threads));
    c.out_dir = r.str("run.out", c.out_dir);

    c.sides = r.list("window.sides", c.sides);

    c.kernel = r.str("field.kernel", c.kernel);
    c.nu = r.real("field.nu", c.nu);
    c.lambda = r.real("field.lambda", c.lambda);
    c.amplitude = r.real("field.amplitude", c.amplitude);
    c.eps_tail = r.real("field.eps_tail", c.eps_tail);
    c.rate = r.real("field.rate", c.rate);
    c.gamma = r.real("field.gamma", c.gamma);

    c.marks = r.str("marks.kind", c.marks);
    c.amp_values = r.list("marks.amp_values", c.amp_values);
    c.amp_probs = r.list("marks.amp_probs", c.amp_probs);
    c.radius_min = r.real("marks.radius_min", c.radius_min);
    c.radius_max = r.real("marks.radius_max", c.radius_max);

    c.functional = r.str("functional.kind", c.functional);
    c.level = r.real("functional.level", c.level);
    c.k = static_cast<int>(r.integer("functional.k", c.k));
    c.grid_spacing = r.real("functional.grid_spacing", c.grid_spacing);
    c.input = r.str("functional.input", c.input);
    c.test_center = r.real("functional.test_center", c.test_center);
    c.test_width = r.real("functional.test_width", c.test_width);
    c.quad_order = static_cast<int>(r.integer("functional.quad_order", c.quad_order));
    c.score = r.str("functional.score", c.score);

    c.replicates = r.integer("estimators.replicates", c.replicates);
    c.K = static_cast<int>(r.integer("estimators.K", c.K));
    c.R_int = r.real("estimators.R_int", c.R_int);
    c.radial_step = r.real("estimators.radial_step", c.radial_step);
    c.deltas = r.list("estimators.deltas", c.deltas);
    c.anticonc_n = r.integer("estimators.anticonc_n", c.anticonc_n);
    c.failure_budget = r.real("estimators.failure_budget", c.failure_budget);
    c.sigma0_method = r.str("estimators.sigma0_method", c.sigma0_method);
    r.finish();
    return c;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str());
}

std::string ExperimentConfig::canonical_text() const {
    std::ostringstream os;
    os << "[run]\n";
    os << "seed = " << seed << "\n";
    os << "dim = " << dim << "\n";
    os << "threads = " << threads << "\n";
    os << "out = " << out_dir << "\n";
    os << "[window]\n";
    if (!sides.empty()) os << "sides = " << fmt_list(sides) << "\n";
    os << "[field]\n";
    os << "kernel = " << kernel << "\n";
    os << "nu = " << fmt_real(nu) << "\n";
    os << "lambda = " << fmt_real(lambda) << "\n";
    os << "amplitude = " << fmt_real(amplitude) << "\n";
    os << "eps_tail = " << fmt_real(eps_tail) << "\n";
    os << "rate = " << fmt_real(rate) << "\n";
    os << "gamma = " << fmt_real(gamma) << "\n";
    os << "[marks]\n";
    os << "kind = " << marks << "\n";
    os << "amp_values = " << fmt_list(amp_values) << "\n";
    os << "amp_probs = " << fmt_list(amp_probs) << "\n";
    os << "radius_min = " << fmt_real(radius_min) << "\n";
    os << "radius_max = " << fmt_real(radius_max) << "\n";
    os << "[functional]\n";
    os << "kind = " << functional << "\n";
    os << "level = " << fmt_real(level) << "\n";
    os << "k = " << k << "\n";
    os << "grid_spacing = " << fmt_real(grid_spacing) << "\n";
    os << "input = " << input << "\n";
    os << "test_center = " << fmt_real(test_center) << "\n";
    os << "test_width = " << fmt_real(test_width) << "\n";
    os << "quad_order = " << quad_order << "\n";
    os << "score = " << score << "\n";
    os << "[estimators]\n";
    os << "replicates = " << replicates << "\n";
    os << "K = " << K << "\n";
    os << "R_int = " << fmt_real(R_int) << "\n";
    os << "radial_step = " << fmt_real(radial_step) << "\n";
    os << "deltas = " << fmt_list(deltas) << "\n";
    os << "anticonc_n = " << anticonc_n << "\n";
    os << "failure_budget = " << fmt_real(failure_budget) << "\n";
    os << "sigma0_method = " << sigma0_method << "\n";
    return os.str();
}

FieldSpec ExperimentConfig::field_spec() const {
    FieldSpec fs;
    fs.marks = mark_distribution();
    if (kernel == "token") {
        if (fs.marks.kind() != MarkKind::disc_grain)
            throw config_error("field.kernel = token requires marks.kind = disc");
        return fs;
    }
    if (kernel == "radial-power")
        fs.radial = RadialKernel::power(nu, lambda, amplitude, dim, eps_tail);
    else if (kernel == "radial-smooth")
        fs.radial = RadialKernel::stretched_exp(nu, rate, gamma, amplitude, dim, eps_tail);
    else
        throw config_error("field.kernel must be radial-power, radial-smooth or token");
    return fs;
}

MarkDistribution ExperimentConfig::mark_distribution() const {
    if (marks == "unit") return MarkDistribution::unit();
    if (marks == "kernel") return MarkDistribution::radial_kernel_tag();
    if (marks == "scalar") return MarkDistribution::scalar_amplitude(amp_values, amp_probs);
    if (marks == "disc")
        return MarkDistribution::disc_grain(amp_values, amp_probs, radius_min, radius_max);
    throw config_error("marks.kind must be unit, kernel, scalar or disc");
}

FunctionalSpec ExperimentConfig::functional_spec() const {
    FunctionalSpec spec;
    if (functional == "excursion-volume")
        spec.kind = FunctionalKind::excursion_volume;
    else if (functional == "fixed-level-perimeter")
        spec.kind = FunctionalKind::fixed_level_perimeter;
    else if (functional == "weighted-perimeter")
        spec.kind = FunctionalKind::weighted_perimeter;
    else if (functional == "total-curvature")
        spec.kind = FunctionalKind::total_curvature;
    else if (functional == "nn-length")
        spec.kind = FunctionalKind::nn_length;
    else if (functional == "score-sum")
        spec.kind = FunctionalKind::score_sum;
    else
        throw config_error("functional.kind unknown: " + functional);
    spec.level = level;
    spec.k = k;
    spec.grid_spacing = grid_spacing;
    if (input == "finite")
        spec.input = InputMode::finite;
    else if (input == "infinite")
        spec.input = InputMode::infinite;
    else
        throw config_error("functional.input must be finite or infinite");
    spec.test_center = test_center;
    spec.test_width = test_width;
    spec.quad_order = quad_order;
    if (score == "count")
        spec.score = ScoreKind::count;
    else if (score == "zero")
        spec.score = ScoreKind::zero;
    else if (score == "nn-phi")
        spec.score = ScoreKind::nn_phi;
    else
        throw config_error("functional.score must be count, zero or nn-phi");
    spec.validate();
    return spec;
}

namespace {

// RFC 4180 CSV: CRLF rows, '.' decimal separator, 17 significant digits.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open for writing: " + path);
    }
    void header(const std::vector<std::string>& cols) { write_cells(cols); }
    void row(const std::vector<std::string>& cells) { write_cells(cells); }
    static std::string real(double v) { return fmt_real(v); }
    static std::string integer(std::int64_t v) { return std::to_string(v); }

  private:
    void write_cells(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            out_ << cells[i];
        }
        out_ << "\r\n";
    }
    std::ofstream out_;
};

ordered_json config_echo(const ExperimentConfig& c) {
    ordered_json j;
    j["run"] = {{"seed", c.seed}, {"dim", c.dim}, {"threads", c.threads}, {"out", c.out_dir}};
    j["window"] = {{"sides", c.sides}};
    j["field"] = {{"kernel", c.kernel},     {"nu", c.nu},           {"lambda", c.lambda},
                  {"amplitude", c.amplitude}, {"eps_tail", c.eps_tail}, {"rate", c.rate},
                  {"gamma", c.gamma}};
    j["marks"] = {{"kind", c.marks},
                  {"amp_values", c.amp_values},
                  {"amp_probs", c.amp_probs},
                  {"radius_min", c.radius_min},
                  {"radius_max", c.radius_max}};
    j["functional"] = {{"kind", c.functional},       {"level", c.level},
                       {"k", c.k},                   {"grid_spacing", c.grid_spacing},
                       {"input", c.input},           {"test_center", c.test_center},
                       {"test_width", c.test_width}, {"quad_order", c.quad_order},
                       {"score", c.score}};
    j["estimators"] = {{"replicates", c.replicates},
                       {"K", c.K},
                       {"R_int", c.R_int},
                       {"radial_step", c.radial_step},
                       {"deltas", c.deltas},
                       {"anticonc_n", c.anticonc_n},
                       {"failure_budget", c.failure_budget},
                       {"sigma0_method", c.sigma0_method}};
    return j;
}

LatticeWindow first_window(const ExperimentConfig& c) {
    if (c.sides.empty()) throw config_error("missing field: window.sides");
    return LatticeWindow::cube(c.sides.front(), c.dim);
}

struct RunContext {
    std::filesystem::path out;
    ordered_json report;
    std::size_t aborts = 0;
};

int run_sample(const ExperimentConfig& c, RunContext& ctx) {
    const LatticeWindow w = first_window(c);
    const MarkedConfiguration config = sample_poisson(
        Region::window_fill(w), c.mark_distribution(), SeedStream{c.seed, 0});
    std::ofstream out(ctx.out / "points.csv", std::ios::binary);
    write_configuration_csv(out, config);
    ctx.report["tables"]["sample"] = {{"points", config.size()},
                                      {"window_cells", w.cell_count()}};
    return 0;
}

int run_field_grid(const ExperimentConfig& c, RunContext& ctx) {
    const LatticeWindow w = first_window(c);
    const FieldSpec fs = c.field_spec();
    const FunctionalSpec spec = c.functional_spec();
    const Region region = sampling_region(spec, fs, w);
    const MarkedConfiguration config =
        sample_poisson(region, fs.marks, SeedStream{c.seed, 0});
    const FieldGrid grid = fs.is_token()
                               ? build_grid(config, TokenKernel{}, w, spec.grid_spacing)
                               : build_grid(config, *fs.radial, w, spec.grid_spacing);
    {
        std::ofstream bin(ctx.out / "grid.bin", std::ios::binary);
        grid.write_binary(bin);
    }
    if (grid.node_count() <= 100000) {
        std::ofstream csv(ctx.out / "grid.csv", std::ios::binary);
        grid.write_csv(csv);
    }
    ctx.report["tables"]["field_grid"] = {{"nodes", grid.node_count()},
                                          {"spacing", grid.spacing()},
                                          {"points", config.size()}};
    return 0;
}

int run_functional(const ExperimentConfig& c, RunContext& ctx) {
    const LatticeWindow w = first_window(c);
    const FieldSpec fs = c.field_spec();
    const FunctionalSpec spec = c.functional_spec();
    SampleBatch batch =
        replicate(spec, fs, w, c.replicates, c.seed, /*context=*/0, c.failure_budget);
    ctx.aborts += batch.aborted_streams.size();
    CsvWriter csv((ctx.out / "values.csv").string());
    csv.header({"replicate", "value"});
    for (std::size_t i = 0; i < batch.values.size(); ++i)
        csv.row({CsvWriter::integer(static_cast<std::int64_t>(i)),
                 CsvWriter::real(batch.values[i])});
    const double m = mean(batch.values);
    const double v = sample_variance(batch.values);
    ctx.report["tables"]["functional"] = {{"replicates", batch.values.size()},
                                          {"mean", m},
                                          {"variance", v},
                                          {"aborts", batch.aborted_streams.size()}};
    return 0;
}

int run_variance_scan(const ExperimentConfig& c, RunContext& ctx) {
    if (c.sides.empty()) throw config_error("missing field: window.sides");
    const FieldSpec fs = c.field_spec();
    const FunctionalSpec spec = c.functional_spec();
    const auto rows = variance_scan(spec, fs, c.sides, c.replicates, c.seed);
    CsvWriter csv((ctx.out / "variance_scan.csv").string());
    csv.header({"side", "cells", "variance", "var_per_cell", "se_var_per_cell", "replicates"});
    ordered_json jrows = ordered_json::array();
    for (const auto& r : rows) {
        csv.row({CsvWriter::real(r.side), CsvWriter::real(r.cells),
                 CsvWriter::real(r.variance), CsvWriter::real(r.var_per_cell),
                 CsvWriter::real(r.se_var_per_cell), CsvWriter::integer(r.replicates)});
        jrows.push_back({{"side", r.side},
                         {"cells", r.cells},
                         {"variance", r.variance},
                         {"var_per_cell", r.var_per_cell},
                         {"se_var_per_cell", r.se_var_per_cell},
                         {"replicates", r.replicates}});
    }
    ctx.report["tables"]["variance_scan"] = jrows;
    return 0;
}

ordered_json sigma0_json(const Sigma0Estimate& e) {
    return {{"method", e.method},
            {"raw", e.raw},
            {"floored", e.floored},
            {"se", e.se},
            {"truncation", e.truncation},
            {"tail_indicator", e.tail_indicator},
            {"tail_warning", e.tail_warning},
            {"replicates", e.replicates}};
}

int run_sigma0(const ExperimentConfig& c, RunContext& ctx) {
    const FieldSpec fs = c.field_spec();
    const FunctionalSpec spec = c.functional_spec();
    std::vector<Sigma0Estimate> ests;
    if (c.sigma0_method == "cov-series" || c.sigma0_method == "both")
        ests.push_back(sigma0_cov_series(spec, fs, c.K, c.replicates, c.seed));
    if (c.sigma0_method == "volume-integral" || c.sigma0_method == "both") {
        if (spec.kind != FunctionalKind::excursion_volume)
            throw config_error(
                "estimators.sigma0_method volume-integral needs functional.kind = "
                "excursion-volume");
        ests.push_back(sigma0_volume_integral(fs, c.dim, spec.level, c.R_int, c.replicates,
                                              c.seed));
    }
    if (ests.empty())
        throw config_error("estimators.sigma0_method must be cov-series, volume-integral or both");
    CsvWriter csv((ctx.out / "sigma0.csv").string());
    csv.header({"method", "raw", "floored", "se", "truncation", "tail_indicator",
                "tail_warning", "replicates"});
    ordered_json jrows = ordered_json::array();
    for (const auto& e : ests) {
        csv.row({e.method, CsvWriter::real(e.raw), CsvWriter::real(e.floored),
                 CsvWriter::real(e.se), CsvWriter::real(e.truncation),
                 CsvWriter::real(e.tail_indicator), e.tail_warning ? "1" : "0",
                 CsvWriter::integer(e.replicates)});
        jrows.push_back(sigma0_json(e));
    }
    ctx.report["tables"]["sigma0"] = jrows;
    return 0;
}

int run_clt(const ExperimentConfig& c, RunContext& ctx) {
    if (c.sides.size() < 3) throw config_error("clt needs window.sides with >= 3 sizes");
    const FieldSpec fs = c.field_spec();
    const FunctionalSpec spec = c.functional_spec();
    std::vector<double> cells, dks;
    CsvWriter csv((ctx.out / "clt.csv").string());
    csv.header({"side", "cells", "replicates", "mean", "sd", "d_K"});
    ordered_json jrows = ordered_json::array();
    for (std::size_t i = 0; i < c.sides.size(); ++i) {
        const LatticeWindow w = LatticeWindow::cube(c.sides[i], c.dim);
        SampleBatch batch = replicate(spec, fs, w, c.replicates, c.seed,
                                      /*context=*/20 + i, c.failure_budget);
        ctx.aborts += batch.aborted_streams.size();
        const double dk = kolmogorov_distance(batch.values, Standardization::plug_in);
        const double m = mean(batch.values);
        const double sd = std::sqrt(sample_variance(batch.values));
        cells.push_back(static_cast<double>(w.cell_count()));
        dks.push_back(dk);
        csv.row({CsvWriter::real(c.sides[i]), CsvWriter::real(cells.back()),
                 CsvWriter::integer(static_cast<std::int64_t>(batch.values.size())),
                 CsvWriter::real(m), CsvWriter::real(sd), CsvWriter::real(dk)});
        jrows.push_back({{"side", c.sides[i]},
                         {"cells", cells.back()},
                         {"replicates", batch.values.size()},
                         {"mean", m},
                         {"sd", sd},
                         {"d_K", dk}});
    }
    const RateFit fit = rate_fit(cells, dks);
    CsvWriter rcsv((ctx.out / "ratefit.csv").string());
    rcsv.header({"slope", "intercept", "residual_norm"});
    rcsv.row({CsvWriter::real(fit.slope), CsvWriter::real(fit.intercept),
              CsvWriter::real(fit.residual_norm)});
    ctx.report["tables"]["clt"] = jrows;
    ctx.report["tables"]["rate_fit"] = {{"slope", fit.slope},
                                        {"intercept", fit.intercept},
                                        {"residual_norm", fit.residual_norm},
                                        {"excluded", fit.excluded}};
    return 0;
}

int run_anticonc(const ExperimentConfig& c, RunContext& ctx) {
    const FieldSpec fs = c.field_spec();
    const auto rows = anti_concentration(fs, c.dim, c.deltas, c.anticonc_n, c.seed);
    CsvWriter csv((ctx.out / "anticonc.csv").string());
    csv.header({"delta", "sup_mass"});
    ordered_json jrows = ordered_json::array();
    std::vector<double> ld, lm;
    for (const auto& r : rows) {
        csv.row({CsvWriter::real(r.delta), CsvWriter::real(r.sup_mass)});
        jrows.push_back({{"delta", r.delta}, {"sup_mass", r.sup_mass}});
        if (r.sup_mass > 0.0) {
            ld.push_back(std::log(r.delta));
            lm.push_back(std::log(r.sup_mass));
        }
    }
    double slope = 0.0;
    if (ld.size() >= 2) {
        const double mx = mean(ld), my = mean(lm);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < ld.size(); ++i) {
            sxx += (ld[i] - mx) * (ld[i] - mx);
            sxy += (ld[i] - mx) * (lm[i] - my);
        }
        slope = sxy / sxx;
    }
    ctx.report["tables"]["anticonc"] = jrows;
    ctx.report["tables"]["anticonc_slope"] = slope;
    return 0;
}

}  // namespace

int run_subcommand(const std::string& name, const ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    if (config.threads > 0) omp_set_num_threads(config.threads);

    RunContext ctx;
    ctx.out = config.out_dir;
    std::error_code ec;
    std::filesystem::create_directories(ctx.out, ec);
    ctx.report["schema_version"] = 1;
    ctx.report["subcommand"] = name;
    ctx.report["config"] = config_echo(config);
    ctx.report["tables"] = ordered_json::object();

    int status = 0;
    try {
        if (name == "sample")
            status = run_sample(config, ctx);
        else if (name == "field-grid")
            status = run_field_grid(config, ctx);
        else if (name == "functional")
            status = run_functional(config, ctx);
        else if (name == "variance-scan")
            status = run_variance_scan(config, ctx);
        else if (name == "sigma0")
            status = run_sigma0(config, ctx);
        else if (name == "clt")
            status = run_clt(config, ctx);
        else if (name == "anticonc")
            status = run_anticonc(config, ctx);
        else {
            std::cerr << "unknown subcommand: " << name << "\n";
            return 2;
        }
    } catch (const replicate_failure& e) {
        std::cerr << "replicate failure budget breached: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const invalid_parameter& e) {
        std::cerr << "invalid parameter: " << e.what() << "\n";
        return 2;
    }

    const auto t1 = std::chrono::steady_clock::now();
    ctx.report["replicate_aborts"] = ctx.aborts;
    ctx.report["wall_clock_seconds"] =
        std::chrono::duration<double>(t1 - t0).count();
    std::ofstream rep(ctx.out / "report.json", std::ios::binary);
    rep << ctx.report.dump(2) << "\n";
    return status;
}

}  // namespace sngeo
