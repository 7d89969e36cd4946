#include "spotvol/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <utility>
#include <variant>

#include "spotvol/errors.hpp"
#include "spotvol/fourier1.hpp"
#include "spotvol/io.hpp"
#include "spotvol/qv.hpp"

namespace spotvol::experiment {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string scheme_name(const MethodSpec& m) {
    switch (m.kind) {
        case MethodKind::QV: return "QV";
        case MethodKind::BP: return "BP";
        case MethodKind::FS1: return "FS1";
        case MethodKind::FS2:
            return m.symmetrization == fourier2::Symmetrization::PostHoc ? "FS2post" : "FS2conv";
    }
    return "?";
}

}  // namespace

MethodSpec MethodSpec::parse(std::string_view text) {
    const auto dash = text.find('-');
    const std::string_view head = text.substr(0, dash);
    MethodSpec m;
    if (head == "QV") {
        m.kind = MethodKind::QV;
    } else if (head == "BP") {
        m.kind = MethodKind::BP;
    } else if (head == "FS1") {
        m.kind = MethodKind::FS1;
    } else if (head == "FS2post") {
        m.kind = MethodKind::FS2;
        m.symmetrization = fourier2::Symmetrization::PostHoc;
    } else if (head == "FS2conv") {
        m.kind = MethodKind::FS2;
        m.symmetrization = fourier2::Symmetrization::Convolution;
    } else {
        throw ConfigError("unknown method '" + std::string(text) + "'");
    }
    if (dash == std::string_view::npos) return m;

    const std::string_view suffix = text.substr(dash + 1);
    if (!m.is_fourier()) {
        throw ConfigError("method '" + std::string(text) + "': only FS methods take a kernel");
    }
    auto bad = [&] { return ConfigError("method '" + std::string(text) + "': bad kernel suffix"); };
    if (suffix.size() == 2 && suffix[0] == 'd' && suffix[1] >= '1' && suffix[1] <= '4') {
        m.kernel_choice = KernelChoice::Ladder;
        m.ladder_index = static_cast<std::size_t>(suffix[1] - '0');
    } else if (suffix.starts_with("delta=")) {
        const std::string_view num = suffix.substr(6);
        double delta = 0.0;
        const auto res = std::from_chars(num.data(), num.data() + num.size(), delta);
        if (res.ec != std::errc{} || res.ptr != num.data() + num.size() || !(delta > 0.0)) {
            throw bad();
        }
        m.kernel_choice = KernelChoice::Explicit;
        m.delta = delta;
    } else {
        throw bad();
    }
    return m;
}

std::string MethodSpec::label() const {
    std::string out = scheme_name(*this);
    if (!is_fourier()) return out;
    switch (kernel_choice) {
        case KernelChoice::Fejer: break;
        case KernelChoice::Ladder: out += "-d" + std::to_string(ladder_index); break;
        case KernelChoice::Explicit: out += "-delta=" + io::format_real(delta); break;
    }
    return out;
}

fourier::Kernel MethodSpec::kernel_for(double horizon, std::size_t steps) const {
    switch (kernel_choice) {
        case KernelChoice::Fejer: return fourier::Kernel::fejer();
        case KernelChoice::Ladder:
            return fourier::Kernel::smoothed(fourier::delta_ladder(ladder_index, horizon, steps));
        case KernelChoice::Explicit: return fourier::Kernel::smoothed(delta);
    }
    return fourier::Kernel::fejer();
}

std::size_t MethodSpec::cutoff_for(std::size_t steps) const {
    return cutoff.value_or(fourier::nyquist_cutoff(steps));
}

double MethodSpec::bandwidth_for(std::size_t steps, double horizon) const {
    if (bandwidth) return *bandwidth;
    if (kind == MethodKind::BP) {
        return qv::jump_bandwidth(steps, horizon,
                                  qv::JumpModelInfo::with_default_rate(holder_alpha, bg_index));
    }
    return qv::default_bandwidth(steps, horizon, holder_alpha);
}

std::vector<double> default_eval_times(const PathSample& path, const MethodSpec& method) {
    std::vector<double> out;
    if (method.is_fourier()) {
        const auto times = path.times();
        out.assign(times.begin() + 1, times.end() - 1);
        return out;
    }
    const double h = method.bandwidth_for(path.steps(), path.horizon());
    const double slack = 1e-9 * path.spacing();
    for (double t : path.times())
        if (t - h >= -slack && t + h <= path.horizon() + slack) out.push_back(t);
    return out;
}

namespace {

template <class E>
[[noreturn]] void rethrow_labelled(const E& e, const std::string& label) {
    throw E(label + ": " + e.what());
}

template <class F>
auto with_label(const std::string& label, F&& body) -> decltype(body()) {
    try {
        return body();
    } catch (const ParseError&) {
        throw;
    } catch (const ContractViolation& e) {
        rethrow_labelled(e, label);
    } catch (const OutOfWindowError& e) {
        rethrow_labelled(e, label);
    } catch (const DegenerateWindowError& e) {
        rethrow_labelled(e, label);
    } catch (const IterationLimitError& e) {
        rethrow_labelled(e, label);
    } catch (const Error& e) {
        rethrow_labelled(e, label);
    }
}

using FourierFit = std::variant<fourier1::Fit, fourier2::Fit>;

FourierFit make_fit(const PathSample& path, const MethodSpec& m) {
    const std::size_t cutoff = m.cutoff_for(path.steps());
    if (m.kind == MethodKind::FS1) {
        fourier1::Config cfg;
        cfg.cutoff = cutoff;
        cfg.n0 = m.n0;
        return fourier1::Fit(path, cfg);
    }
    fourier2::Config cfg;
    cfg.cutoff = cutoff;
    cfg.symmetrization = m.symmetrization;
    return fourier2::Fit(path, cfg);
}

SpotMatrixSeries fit_series(const FourierFit& fit, const fourier::Kernel& kernel,
                            std::span<const double> times) {
    return std::visit([&](const auto& f) { return f.series(kernel, times); }, fit);
}

/// Methods sharing this key share one coefficient pass.
std::string fit_key(const MethodSpec& m, std::size_t steps) {
    std::string key = scheme_name(m) + "/N=" + std::to_string(m.cutoff_for(steps));
    if (m.kind == MethodKind::FS1) key += "/n0=" + std::to_string(m.n0);
    return key;
}

SpotMatrixSeries run_direct(const PathSample& path, const MethodSpec& m,
                            std::span<const double> times) {
    const double horizon = path.horizon();
    const std::size_t n = path.steps();
    switch (m.kind) {
        case MethodKind::QV: {
            const qv::QvEstimator est(path, {m.bandwidth_for(n, horizon), m.holder_alpha});
            return est.series(times);
        }
        case MethodKind::BP: {
            const qv::BipowerEstimator est(path, {m.bandwidth_for(n, horizon), m.holder_alpha});
            return est.series(times);
        }
        case MethodKind::FS1:
        case MethodKind::FS2:
            return fit_series(make_fit(path, m), m.kernel_for(horizon, n), times);
    }
    throw ContractViolation("unknown method kind");
}

}  // namespace

SpotMatrixSeries estimate_path(const PathSample& path, const MethodSpec& method,
                               std::optional<std::span<const double>> times) {
    return with_label(method.label(), [&] {
        if (times) return run_direct(path, method, *times);
        const std::vector<double> defaults = default_eval_times(path, method);
        return run_direct(path, method, defaults);
    });
}

std::vector<MethodOutcome> estimate_all(const PathSample& path,
                                        std::span<const MethodSpec> methods) {
    std::vector<MethodOutcome> out(methods.size());
    struct SharedFit {
        std::unique_ptr<FourierFit> fit;
        std::string error;
        double build_ms = 0.0;
    };
    std::map<std::string, SharedFit> fits;

    for (std::size_t i = 0; i < methods.size(); ++i) {
        const MethodSpec& m = methods[i];
        const std::string label = m.label();
        try {
            const std::vector<double> times = default_eval_times(path, m);
            if (!m.is_fourier()) {
                const auto start = Clock::now();
                out[i].series = estimate_path(path, m, times);
                out[i].wall_ms = elapsed_ms(start);
                continue;
            }
            SharedFit& shared = fits[fit_key(m, path.steps())];
            if (!shared.fit && shared.error.empty()) {
                const auto start = Clock::now();
                try {
                    shared.fit = std::make_unique<FourierFit>(
                        with_label(label, [&] { return make_fit(path, m); }));
                } catch (const std::exception& e) {
                    shared.error = e.what();
                }
                shared.build_ms = elapsed_ms(start);
            }
            if (!shared.fit) {
                out[i].error = shared.error;
                continue;
            }
            const auto start = Clock::now();
            out[i].series = with_label(label, [&] {
                return fit_series(*shared.fit, m.kernel_for(path.horizon(), path.steps()), times);
            });
            out[i].wall_ms = shared.build_ms + elapsed_ms(start);
        } catch (const std::exception& e) {
            out[i].error = e.what();
        }
    }
    return out;
}

std::size_t ExperimentSpec::replications_for(std::size_t grid_size) const {
    const auto it = replications_by_grid.find(grid_size);
    return it != replications_by_grid.end() ? it->second : replications;
}

void ExperimentSpec::validate() const {
    try {
        model.validate();
        if (jumps) jumps->validate(model.d);
    } catch (const ContractViolation& e) {
        throw ConfigError(e.what());
    }
    if (methods.empty()) throw ConfigError("no methods configured");
    if (grid_sizes.empty()) throw ConfigError("grid_sizes must be non-empty");
    for (std::size_t g : grid_sizes)
        if (g < 4) throw ConfigError("every grid size must be >= 4");
    if (replications < 1) throw ConfigError("replications must be >= 1");
    for (const auto& [g, r] : replications_by_grid)
        if (r < 1) throw ConfigError("replications_by_grid entries must be >= 1");
    if (!(trim_fraction >= 0.0 && trim_fraction < 0.5)) {
        throw ConfigError("trim_fraction must lie in [0, 0.5)");
    }
    for (const MethodSpec& m : methods) {
        if (m.kind == MethodKind::FS1 && m.cutoff && m.n0 > *m.cutoff) {
            throw ConfigError(m.label() + ": n0 exceeds the cutoff");
        }
        if (!(m.holder_alpha > 0.0 && m.holder_alpha <= 1.0)) {
            throw ConfigError(m.label() + ": holder_alpha must lie in (0, 1]");
        }
        if (!(m.bg_index >= 0.0 && m.bg_index < 2.0)) {
            throw ConfigError(m.label() + ": bg_index must lie in [0, 2)");
        }
        if (m.bandwidth && !(*m.bandwidth > 0.0 && *m.bandwidth < model.horizon / 2.0)) {
            throw ConfigError(m.label() + ": bandwidth must satisfy 0 < h < T/2");
        }
    }
}

ExperimentSpec paper_heston_preset() {
    ExperimentSpec spec;
    spec.preset = "paper-heston";
    spec.model = sim::HestonSpec::preset(1000);
    spec.methods.push_back(MethodSpec::parse("QV"));
    for (const char* scheme : {"FS1", "FS2post", "FS2conv"}) {
        spec.methods.push_back(MethodSpec::parse(scheme));
        for (int i = 1; i <= 4; ++i)
            spec.methods.push_back(MethodSpec::parse(std::string(scheme) + "-d" + std::to_string(i)));
    }
    spec.grid_sizes = {100, 1000, 10000};
    spec.replications = 100;
    spec.replications_by_grid = {{10000, 20}};
    spec.seed = 20130601;
    spec.trim_fraction = 0.1;
    return spec;
}

namespace {

template <class T>
T take(const json& obj, const char* key, T fallback) {
    const auto it = obj.find(key);
    if (it == obj.end()) return fallback;
    try {
        return it->template get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

sim::HestonSpec parse_model(const json& m, sim::HestonSpec base) {
    base.d = take(m, "d", base.d);
    base.d1 = take(m, "d1", base.d1);
    base.drift = take(m, "drift", base.drift);
    if (m.contains("loadings")) {
        const auto rows = take<std::vector<std::vector<double>>>(m, "loadings", {});
        base.loadings.clear();
        for (const auto& row : rows) {
            if (row.size() != base.d1) throw ConfigError("model.loadings rows must have d1 entries");
            base.loadings.insert(base.loadings.end(), row.begin(), row.end());
        }
    }
    base.mean_reversion = take(m, "mean_reversion", base.mean_reversion);
    base.long_run = take(m, "long_run", base.long_run);
    base.vol_of_vol = take(m, "vol_of_vol", base.vol_of_vol);
    base.v0 = take(m, "v0", base.v0);
    base.x0 = take(m, "x0", base.x0);
    base.horizon = take(m, "horizon", base.horizon);
    return base;
}

sim::JumpSpec parse_jumps(const json& j) {
    sim::JumpSpec out;
    out.intensity = take(j, "intensity", 0.0);
    if (j.contains("fixed")) {
        out.size_kind = sim::JumpSpec::SizeKind::FixedVector;
        out.fixed = take<std::vector<double>>(j, "fixed", {});
    } else if (j.contains("gaussian_stddev")) {
        out.size_kind = sim::JumpSpec::SizeKind::GaussianIid;
        out.stddev = take(j, "gaussian_stddev", 0.0);
    } else {
        throw ConfigError("jumps needs either 'fixed' or 'gaussian_stddev'");
    }
    return out;
}

}  // namespace

ExperimentSpec parse_experiment(const json& doc) {
    if (!doc.is_object()) throw ConfigError("config document must be a JSON object");
    ExperimentSpec spec;
    if (doc.contains("preset")) {
        const auto name = take<std::string>(doc, "preset", "");
        if (name != "paper-heston") throw ConfigError("unknown preset '" + name + "'");
        spec = paper_heston_preset();
    }
    if (doc.contains("model")) spec.model = parse_model(doc.at("model"), spec.model);
    if (doc.contains("jumps")) {
        if (doc.at("jumps").is_null()) {
            spec.jumps.reset();
        } else {
            spec.jumps = parse_jumps(doc.at("jumps"));
        }
    }
    if (doc.contains("methods")) {
        spec.methods.clear();
        for (const auto& m : doc.at("methods")) {
            if (!m.is_string()) throw ConfigError("methods must be strings such as \"FS1-d3\"");
            spec.methods.push_back(MethodSpec::parse(m.get<std::string>()));
        }
    }
    spec.grid_sizes = take(doc, "grid_sizes", spec.grid_sizes);
    spec.replications = take(doc, "replications", spec.replications);
    if (doc.contains("replications_by_grid")) {
        spec.replications_by_grid.clear();
        for (const auto& [key, value] : doc.at("replications_by_grid").items()) {
            std::size_t grid = 0;
            const auto res = std::from_chars(key.data(), key.data() + key.size(), grid);
            if (res.ec != std::errc{} || !value.is_number_integer()) {
                throw ConfigError("replications_by_grid must map grid sizes to integers");
            }
            spec.replications_by_grid[grid] = value.get<std::size_t>();
        }
    }
    spec.seed = take(doc, "seed", spec.seed);
    spec.trim_fraction = take(doc, "trim_fraction", spec.trim_fraction);
    spec.workers = take(doc, "workers", spec.workers);
    spec.write_traces = take(doc, "write_traces", spec.write_traces);
    if (doc.contains("output_dir")) spec.output_dir = take<std::string>(doc, "output_dir", "");
    spec.validate();
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot open config " + file.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config " + file.string() + ": " + e.what());
    }
    return parse_experiment(doc);
}

json to_json(const ExperimentSpec& spec) {
    const auto& m = spec.model;
    std::vector<std::vector<double>> loadings;
    for (std::size_t i = 0; i < m.d; ++i)
        loadings.emplace_back(m.loadings.begin() + static_cast<long>(i * m.d1),
                              m.loadings.begin() + static_cast<long>((i + 1) * m.d1));
    json doc;
    if (!spec.preset.empty()) doc["preset"] = spec.preset;
    doc["model"] = {{"d", m.d},
                    {"d1", m.d1},
                    {"drift", m.drift},
                    {"loadings", loadings},
                    {"mean_reversion", m.mean_reversion},
                    {"long_run", m.long_run},
                    {"vol_of_vol", m.vol_of_vol},
                    {"v0", m.v0},
                    {"x0", m.x0},
                    {"horizon", m.horizon}};
    if (spec.jumps) {
        json j{{"intensity", spec.jumps->intensity}};
        if (spec.jumps->size_kind == sim::JumpSpec::SizeKind::FixedVector) {
            j["fixed"] = spec.jumps->fixed;
        } else {
            j["gaussian_stddev"] = spec.jumps->stddev;
        }
        doc["jumps"] = j;
    }
    json methods = json::array();
    for (const auto& method : spec.methods) methods.push_back(method.label());
    doc["methods"] = methods;
    doc["grid_sizes"] = spec.grid_sizes;
    doc["replications"] = spec.replications;
    json by_grid = json::object();
    for (const auto& [g, r] : spec.replications_by_grid) by_grid[std::to_string(g)] = r;
    doc["replications_by_grid"] = by_grid;
    doc["seed"] = spec.seed;
    doc["trim_fraction"] = spec.trim_fraction;
    doc["write_traces"] = spec.write_traces;
    return doc;
}

const MethodSummary& ExperimentResult::find(std::string_view method,
                                            std::size_t grid_size) const {
    for (const auto& row : rows)
        if (row.method == method && row.grid_size == grid_size) return row;
    throw ContractViolation("no result for " + std::string(method) + " at N0 = " +
                            std::to_string(grid_size));
}

bool ExperimentResult::any_failure() const noexcept {
    return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.failed(); });
}

namespace {

struct RepMetrics {
    bool ok = false;
    std::string error;
    double mse = 0.0;
    double mse_min = 0.0;
    std::size_t count = 0;
    std::size_t negatives = 0;
    double min_eigenvalue = std::numeric_limits<double>::infinity();
    double sup_l1 = 0.0;
    double mean_l1 = 0.0;
    double wall_ms = 0.0;
};

struct RepResult {
    std::vector<RepMetrics> per_method;
    std::optional<sim::Simulation> simulation;  // kept for replication 0 traces
    std::vector<std::optional<SpotMatrixSeries>> series;
};

RepMetrics score(const SpotMatrixSeries& est, const SpotMatrixSeries& truth, double trim,
                 const std::string& label) {
    RepMetrics r;
    const metrics::ErrorReport report = metrics::error_report(est, truth, trim, label);
    r.ok = true;
    r.mse = report.mse;
    r.mse_min = report.mse_min;
    r.count = report.evaluated_count;
    const metrics::IndexRange keep = metrics::trim_indices(truth.size() - 1, trim);
    double l1_sum = 0.0;
    for (const SpotPoint& p : est.points) {
        const Spectrum& ref = truth.points[*p.grid_index].spectrum;
        const double l1 = spectrum_l1_distance(p.spectrum, ref);
        r.sup_l1 = std::max(r.sup_l1, l1);
        r.min_eigenvalue = std::min(r.min_eigenvalue, p.spectrum.min());
        if (!keep.contains(*p.grid_index)) continue;
        l1_sum += l1;
        if (p.spectrum.min() < kNegativeEigenThreshold) ++r.negatives;
    }
    if (r.count > 0) r.mean_l1 = l1_sum / static_cast<double>(r.count);
    return r;
}

std::uint64_t grid_seed(std::uint64_t seed, std::size_t grid_size) {
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(grid_size)));
}

void write_trace(const std::filesystem::path& file, const sim::Simulation& simulation,
                 std::span<const MethodSpec> methods,
                 const std::vector<std::optional<SpotMatrixSeries>>& series) {
    std::ofstream out(file);
    if (!out) throw IoError("cannot create " + file.string());
    const auto& truth = simulation.truth.sigma;
    const std::size_t rows = truth.size();
    // Per method, grid index -> point.
    std::vector<std::vector<const SpotPoint*>> lookup(methods.size(),
                                                      std::vector<const SpotPoint*>(rows));
    out << "t,true_max,true_min";
    for (std::size_t m = 0; m < methods.size(); ++m) {
        out << ',' << methods[m].label() << "_max," << methods[m].label() << "_min";
        if (!series[m]) continue;
        for (const auto& p : series[m]->points) lookup[m][*p.grid_index] = &p;
    }
    out << '\n';
    for (std::size_t k = 0; k < rows; ++k) {
        const SpotPoint& tp = truth.points[k];
        out << io::format_real(tp.time) << ',' << io::format_real(tp.spectrum.max()) << ','
            << io::format_real(tp.spectrum.min());
        for (std::size_t m = 0; m < methods.size(); ++m) {
            const SpotPoint* p = lookup[m][k];
            if (p) {
                out << ',' << io::format_real(p->spectrum.max()) << ','
                    << io::format_real(p->spectrum.min());
            } else {
                out << ",,";
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed: " + file.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec, std::ostream* progress) {
    spec.validate();
    const bool write = !spec.output_dir.empty();
    if (write) std::filesystem::create_directories(spec.output_dir);

    std::vector<std::string> labels;
    for (const auto& m : spec.methods) labels.push_back(m.label());

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = spec.workers == 0 ? hw : spec.workers;

    ExperimentResult result;
    for (std::size_t grid : spec.grid_sizes) {
        sim::HestonSpec model = spec.model;
        model.grid_size = grid;
        const std::size_t reps = spec.replications_for(grid);
        const std::uint64_t seed = grid_seed(spec.seed, grid);
        std::vector<RepResult> reps_out(reps);

        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t r = next++; r < reps; r = next++) {
                RepResult& slot = reps_out[r];
                slot.per_method.resize(spec.methods.size());
                sim::Simulation simulation = sim::simulate_heston(model, spec.jumps, seed, r);
                auto outcomes = estimate_all(simulation.path, spec.methods);
                for (std::size_t m = 0; m < outcomes.size(); ++m) {
                    RepMetrics& rm = slot.per_method[m];
                    if (!outcomes[m].series) {
                        rm.error = outcomes[m].error;
                        continue;
                    }
                    try {
                        rm = score(*outcomes[m].series, simulation.truth.sigma, spec.trim_fraction,
                                   labels[m]);
                    } catch (const std::exception& e) {
                        rm.ok = false;
                        rm.error = labels[m] + ": " + e.what();
                    }
                    rm.wall_ms = outcomes[m].wall_ms;
                }
                if (r == 0 && spec.write_traces && write) {
                    slot.series.reserve(outcomes.size());
                    for (auto& o : outcomes) slot.series.push_back(std::move(o.series));
                    slot.simulation = std::move(simulation);
                }
            }
        };
        const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, reps));
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
        }

        for (std::size_t m = 0; m < spec.methods.size(); ++m) {
            MethodSummary s;
            s.method = labels[m];
            s.grid_size = grid;
            s.replications = reps;
            std::vector<double> mse;
            std::vector<double> mse_min;
            std::vector<double> sup;
            std::vector<double> l1;
            double wall = 0.0;
            std::size_t negatives = 0;
            s.min_eigenvalue = std::numeric_limits<double>::infinity();
            for (const RepResult& rep : reps_out) {
                const RepMetrics& rm = rep.per_method[m];
                if (!rm.ok) {
                    if (s.failures++ == 0) s.first_error = rm.error;
                    continue;
                }
                mse.push_back(rm.mse);
                mse_min.push_back(rm.mse_min);
                sup.push_back(rm.sup_l1);
                l1.push_back(rm.mean_l1);
                wall += rm.wall_ms;
                negatives += rm.negatives;
                s.evaluated_points += rm.count;
                s.min_eigenvalue = std::min(s.min_eigenvalue, rm.min_eigenvalue);
            }
            s.mse = metrics::mean_stderr(mse);
            s.mse_min = metrics::mean_stderr(mse_min);
            s.mean_sup_l1 = metrics::mean_stderr(sup).mean;
            s.mean_l1 = metrics::mean_stderr(l1).mean;
            s.wall_ms = mse.empty() ? 0.0 : wall / static_cast<double>(mse.size());
            s.negative_fraction = s.evaluated_points == 0
                                      ? 0.0
                                      : static_cast<double>(negatives) /
                                            static_cast<double>(s.evaluated_points);
            result.rows.push_back(std::move(s));
        }

        if (write) {
            std::ofstream runs(spec.output_dir / ("runs_N0_" + std::to_string(grid) + ".csv"));
            runs << "replication,method,mse,mse_min,evaluated,status\n";
            for (std::size_t r = 0; r < reps; ++r) {
                for (std::size_t m = 0; m < spec.methods.size(); ++m) {
                    const RepMetrics& rm = reps_out[r].per_method[m];
                    runs << r << ',' << labels[m] << ',' << io::format_real(rm.mse) << ','
                         << io::format_real(rm.mse_min) << ',' << rm.count << ','
                         << (rm.ok ? "ok" : "failed") << '\n';
                }
            }
            if (!runs) throw IoError("cannot write runs csv");
            if (spec.write_traces && reps_out[0].simulation) {
                write_trace(spec.output_dir / ("trace_N0_" + std::to_string(grid) + ".csv"),
                            *reps_out[0].simulation, spec.methods, reps_out[0].series);
            }
        }
        if (progress) {
            *progress << "N0 = " << grid << ": " << reps << " replications done\n" << std::flush;
        }
    }

    if (write) {
        std::ofstream summary(spec.output_dir / "summary.csv");
        write_summary_csv(result, summary);
        std::ofstream diag(spec.output_dir / "diagnostics.csv");
        diag << "method,N0,replications,failures,negative_fraction,min_eigenvalue,mean_l1,"
                "mean_sup_l1,evaluated_points,first_error\n";
        for (const auto& s : result.rows) {
            std::string err = s.first_error;
            std::replace(err.begin(), err.end(), ',', ';');
            diag << s.method << ',' << s.grid_size << ',' << s.replications << ',' << s.failures
                 << ',' << io::format_real(s.negative_fraction) << ','
                 << io::format_real(s.min_eigenvalue) << ',' << io::format_real(s.mean_l1) << ','
                 << io::format_real(s.mean_sup_l1)
                 << ',' << s.evaluated_points << ',' << err << '\n';
        }
        json meta;
        meta["config"] = to_json(spec);
        json reps = json::object();
        for (std::size_t g : spec.grid_sizes) reps[std::to_string(g)] = spec.replications_for(g);
        meta["replications_per_grid"] = reps;
        meta["workers"] = workers;
        meta["notes"] = {
            {"parameter_reading",
             "drift gamma_i = i/100 for i = 1..d; long-run b_j = v_j(0) = j/100 for j = 1..d1"},
            {"mse_divisor", "number of retained grid points after trimming"},
            {"fourier_cutoff", "2N = N0/2 unless a method overrides it"},
            {"epsilon", "table values below 1e-10 are printed as the epsilon marker"}};
        std::ofstream meta_out(spec.output_dir / "metadata.json");
        meta_out << meta.dump(2) << '\n';
        if (!summary || !diag || !meta_out) throw IoError("cannot write experiment outputs");
    }
    return result;
}

void write_summary_csv(const ExperimentResult& result, std::ostream& sink, bool include_timing) {
    sink << "method,N0,mean_mse,mean_mse_min,stderr_mse,stderr_mse_min";
    if (include_timing) sink << ",wall_ms";
    sink << '\n';
    for (const auto& s : result.rows) {
        sink << s.method << ',' << s.grid_size << ',' << io::format_real(s.mse.mean) << ','
             << io::format_real(s.mse_min.mean) << ',' << io::format_real(s.mse.std_error) << ','
             << io::format_real(s.mse_min.std_error);
        if (include_timing) {
            std::ostringstream ms;
            ms << std::fixed << std::setprecision(3) << s.wall_ms;
            sink << ',' << ms.str();
        }
        sink << '\n';
    }
    if (!sink) throw IoError("write failed: summary csv");
}

std::vector<SummaryRow> read_summary_csv(std::istream& source) {
    std::string line;
    if (!std::getline(source, line) || !line.starts_with("method,N0,mean_mse,mean_mse_min")) {
        throw ParseError(1, "not a summary csv");
    }
    std::vector<SummaryRow> rows;
    std::size_t line_no = 1;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
        if (f.size() < 6) throw ParseError(line_no, "expected at least 6 fields");
        SummaryRow row;
        row.method = f[0];
        row.grid_size = static_cast<std::size_t>(io::parse_real(f[1], line_no));
        row.mean_mse = io::parse_real(f[2], line_no);
        row.mean_mse_min = io::parse_real(f[3], line_no);
        row.stderr_mse = io::parse_real(f[4], line_no);
        row.stderr_mse_min = io::parse_real(f[5], line_no);
        if (f.size() > 6) row.wall_ms = io::parse_real(f[6], line_no);
        rows.push_back(std::move(row));
    }
    return rows;
}

void render_tables(std::span<const SummaryRow> rows, std::ostream& out) {
    std::vector<std::string> methods;
    std::vector<std::size_t> grids;
    for (const auto& r : rows) {
        if (std::find(methods.begin(), methods.end(), r.method) == methods.end())
            methods.push_back(r.method);
        if (std::find(grids.begin(), grids.end(), r.grid_size) == grids.end())
            grids.push_back(r.grid_size);
    }
    auto cell = [&](const std::string& m, std::size_t g, bool min) -> std::string {
        for (const auto& r : rows)
            if (r.method == m && r.grid_size == g)
                return metrics::format_table_value(min ? r.mean_mse_min : r.mean_mse);
        return "-";
    };
    // "ε" is two bytes in UTF-8 but one column wide.
    auto pad = [](const std::string& s, std::size_t width) {
        const std::size_t shown = s == "ε" ? 1 : s.size();
        return std::string(width > shown ? width - shown : 0, ' ') + s;
    };
    constexpr std::size_t w = 11;
    out << "Means of MSE and mSE (x 1e-4); ε marks values below 1e-10\n";
    out << pad("", 5) << pad("N0", 8);
    for (const auto& m : methods) out << pad(m, w);
    out << '\n';
    for (std::size_t g : grids) {
        out << pad("MSE", 5) << pad(std::to_string(g), 8);
        for (const auto& m : methods) out << pad(cell(m, g, false), w);
        out << '\n' << pad("mSE", 5) << pad("", 8);
        for (const auto& m : methods) out << pad(cell(m, g, true), w);
        out << '\n';
    }
}

std::vector<TimingRow> timing_report(const ExperimentSpec& spec) {
    spec.validate();
    std::vector<TimingRow> rows;
    for (std::size_t grid : spec.grid_sizes) {
        sim::HestonSpec model = spec.model;
        model.grid_size = grid;
        const sim::Simulation simulation =
            sim::simulate_heston(model, spec.jumps, grid_seed(spec.seed, grid), 0);
        for (const auto& m : spec.methods) {
            std::vector<double> runs;
            for (int i = 0; i < 3; ++i) {
                const auto start = Clock::now();
                const SpotMatrixSeries s = estimate_path(simulation.path, m);
                runs.push_back(elapsed_ms(start));
                if (s.empty()) break;
            }
            std::sort(runs.begin(), runs.end());
            rows.push_back({m.label(), grid, runs[runs.size() / 2]});
        }
    }
    return rows;
}

}  // namespace spotvol::experiment
