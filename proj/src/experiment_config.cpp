#include <charconv>
#include <string>

#include "sketchrec/errors.hpp"
#include "sketchrec/harness.hpp"

namespace sketchrec {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    text = trim(text);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw InvalidConfig("bad value for '" + std::string(key) + "': '" + std::string(text) + "'");
    }
    return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
    text = trim(text);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw InvalidConfig("bad boolean for '" + std::string(key) + "': '" + std::string(text) + "'");
}

std::vector<std::size_t> parse_list(std::string_view key, std::string_view text) {
    std::vector<std::size_t> out;
    text = trim(text);
    while (!text.empty()) {
        const auto comma = text.find(',');
        out.push_back(parse_number<std::size_t>(key, text.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    if (out.empty()) throw InvalidConfig("empty list for '" + std::string(key) + "'");
    return out;
}

ExperimentConfig series(std::string name, EnsembleKind a, EnsembleKind b, std::size_t k, SolverKind solver) {
    ExperimentConfig cfg;
    cfg.name = std::move(name);
    cfg.n = 40;
    cfg.m_values = default_ml_grid();
    cfg.lock_ml = true;
    cfg.k = k;
    cfg.sigma_v2 = 0.01;
    cfg.trials = 50;
    cfg.ensemble_a = a;
    cfg.ensemble_b = b;
    cfg.solver = solver;
    return cfg;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> ExperimentConfig::points() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    if (lock_ml) {
        for (const auto m : m_values) out.emplace_back(m, m);
    } else {
        for (const auto m : m_values) {
            for (const auto l : l_values) out.emplace_back(m, l);
        }
    }
    return out;
}

void ExperimentConfig::validate() const {
    if (n == 0) throw InvalidConfig("n must be positive");
    if (trials < 1) throw InvalidConfig("trials must be at least 1");
    if (k < 1 || k > n) throw InvalidConfig("k must lie in [1, n]");
    if (!(sigma_v2 >= 0.0)) throw InvalidConfig("sigma_v2 must be nonnegative");
    if (m_values.empty()) throw InvalidConfig("m_values is empty");
    if (!lock_ml && l_values.empty()) throw InvalidConfig("l_values is empty");
    for (const auto& [m, l] : points()) {
        if (m < 1 || m > n || l < 1 || l > n) {
            throw InvalidConfig("grid point (" + std::to_string(m) + ", " + std::to_string(l) + ") outside [1, n]");
        }
    }
    if (!(fista.beta > 0.0 && fista.beta < 1.0)) throw InvalidConfig("beta must lie in (0, 1)");
    if (!(fista.lambda_init_ratio > 0.0)) throw InvalidConfig("lambda_init_ratio must be positive");
    if (!(fista.lambda_bar_ratio > 0.0 && fista.lambda_bar_ratio <= 1.0)) {
        throw InvalidConfig("lambda_bar_ratio must lie in (0, 1]");
    }
    if (fista.max_iters < 1) throw InvalidConfig("max_iters must be at least 1");
    if (!(fista.rel_tol >= 0.0)) throw InvalidConfig("rel_tol must be nonnegative");
    if (!(omp_residual_tol >= 0.0)) throw InvalidConfig("omp_residual_tol must be nonnegative");
}

std::vector<std::size_t> default_ml_grid() { return {8, 12, 16, 20, 24, 28, 32, 36, 40}; }

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3"}; }

std::vector<ExperimentConfig> preset(std::string_view name) {
    using E = EnsembleKind;
    using S = SolverKind;
    const E gauss = E::GaussianOrthonormalRows;
    if (name == "fig1") {
        return {
            series("fig1-gaussian-k1", gauss, gauss, 1, S::FistaMatrix),
            series("fig1-gaussian-k2", gauss, gauss, 2, S::FistaMatrix),
            series("fig1-gaussian-k4", gauss, gauss, 4, S::FistaMatrix),
            series("fig1-dct-k2", E::DctRandomRows, E::DctRandomRows, 2, S::FistaMatrix),
            series("fig1-binary-k2", E::Binary, E::Binary, 2, S::FistaMatrix),
            series("fig1-binary-gaussian-k2", E::Binary, gauss, 2, S::FistaMatrix),
        };
    }
    if (name == "fig2") {
        auto fixed = series("fig2-dct-fixed-m", E::DctRandomRows, E::DctRandomRows, 2, S::FistaMatrix);
        fixed.lock_ml = false;
        fixed.m_values = {8, 16};
        fixed.l_values = default_ml_grid();
        return {fixed, series("fig2-dct-diagonal", E::DctRandomRows, E::DctRandomRows, 2, S::FistaMatrix)};
    }
    if (name == "fig3") {
        auto noiseless = [](ExperimentConfig cfg) {
            cfg.sigma_v2 = 0.0;
            return cfg;
        };
        return {
            noiseless(series("fig3-gaussian", gauss, gauss, 1, S::OmpMatrix)),
            noiseless(series("fig3-dct", E::DctRandomRows, E::DctRandomRows, 1, S::OmpMatrix)),
            noiseless(series("fig3-binary", E::Binary, E::Binary, 1, S::OmpMatrix)),
            noiseless(series("fig3-binary-gaussian", E::Binary, gauss, 1, S::OmpMatrix)),
        };
    }
    std::string names;
    for (const auto& p : preset_names()) names += (names.empty() ? "" : ", ") + p;
    throw InvalidConfig("unknown preset '" + std::string(name) + "' (available: " + names + ")");
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    key = trim(key);
    value = trim(value);
    if (key == "name") {
        cfg.name = std::string(value);
    } else if (key == "n") {
        cfg.n = parse_number<std::size_t>(key, value);
    } else if (key == "m_values") {
        cfg.m_values = parse_list(key, value);
    } else if (key == "l_values") {
        cfg.l_values = parse_list(key, value);
    } else if (key == "lock_ml") {
        cfg.lock_ml = parse_bool(key, value);
    } else if (key == "k") {
        cfg.k = parse_number<std::size_t>(key, value);
    } else if (key == "sigma_v2") {
        cfg.sigma_v2 = parse_number<double>(key, value);
    } else if (key == "trials") {
        cfg.trials = parse_number<std::size_t>(key, value);
    } else if (key == "ensemble_a" || key == "ensemble_b") {
        const auto kind = parse_ensemble(value);
        if (!kind) throw InvalidConfig("unknown ensemble '" + std::string(value) + "'");
        (key == "ensemble_a" ? cfg.ensemble_a : cfg.ensemble_b) = *kind;
    } else if (key == "solver") {
        const auto kind = parse_solver(value);
        if (!kind) throw InvalidConfig("unknown solver '" + std::string(value) + "'");
        cfg.solver = *kind;
    } else if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "lambda_init_ratio") {
        cfg.fista.lambda_init_ratio = parse_number<double>(key, value);
    } else if (key == "lambda_bar_ratio") {
        cfg.fista.lambda_bar_ratio = parse_number<double>(key, value);
    } else if (key == "beta") {
        cfg.fista.beta = parse_number<double>(key, value);
    } else if (key == "max_iters") {
        cfg.fista.max_iters = parse_number<std::size_t>(key, value);
    } else if (key == "rel_tol") {
        cfg.fista.rel_tol = parse_number<double>(key, value);
    } else if (key == "omp_budget") {
        cfg.omp_budget = parse_number<std::size_t>(key, value);
    } else if (key == "omp_residual_tol") {
        cfg.omp_residual_tol = parse_number<double>(key, value);
    } else {
        throw InvalidConfig("unknown config key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config_text(std::string_view text, ExperimentConfig base) {
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw InvalidConfig("config line " + std::to_string(line_no) + ": expected key=value");
        }
        try {
            apply_setting(base, line.substr(0, eq), line.substr(eq + 1));
        } catch (const InvalidConfig& e) {
            throw InvalidConfig("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {{"name", cfg.name},
            {"n", cfg.n},
            {"m_values", cfg.m_values},
            {"l_values", cfg.l_values},
            {"lock_ml", cfg.lock_ml},
            {"k", cfg.k},
            {"sigma_v2", cfg.sigma_v2},
            {"trials", cfg.trials},
            {"ensemble_a", to_string(cfg.ensemble_a)},
            {"ensemble_b", to_string(cfg.ensemble_b)},
            {"solver", to_string(cfg.solver)},
            {"lambda_init_ratio", cfg.fista.lambda_init_ratio},
            {"lambda_bar_ratio", cfg.fista.lambda_bar_ratio},
            {"beta", cfg.fista.beta},
            {"max_iters", cfg.fista.max_iters},
            {"rel_tol", cfg.fista.rel_tol},
            {"omp_budget", cfg.effective_omp_budget()},
            {"omp_residual_tol", cfg.omp_residual_tol},
            {"seed", cfg.seed}};
}

}  // namespace sketchrec
