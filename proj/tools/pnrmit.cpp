// pnrmit: simulate, calibrate, model, and mitigate bitwise photon-number
// readout. See README.md for the pipeline and file formats.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>
#include <nlohmann/json.hpp>

#include "pnr/calibrate.hpp"
#include "pnr/fock.hpp"
#include "pnr/hmm.hpp"
#include "pnr/io.hpp"
#include "pnr/mitigate.hpp"
#include "pnr/multimode.hpp"
#include "pnr/params.hpp"
#include "pnr/simulate.hpp"

namespace {

constexpr const char* kVersion =
    "pnrmit 1.0.0 (schemas: params=1 hist-csv=1 confusion-csv=1 shots-jsonl=1 "
    "calibration-json=1 sparse-jsonl=1)";

constexpr int kExitInput = 2;
constexpr int kExitNumericalGuard = 3;

struct CommonOpts {
    std::uint64_t seed = 1;
    bool seed_given = false;
    int threads = 0;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "RNG master seed (env PNR_SEED as fallback)")
        ->each([&opts](const std::string&) { opts.seed_given = true; });
    cmd->add_option("--threads", opts.threads, "worker threads (0 = all cores)");
    cmd->add_option("--format", opts.format, "stdout report format")
        ->check(CLI::IsMember({"csv", "json"}));
}

std::uint64_t resolve_seed(const CommonOpts& opts) {
    if (opts.seed_given) return opts.seed;
    if (const char* env = std::getenv("PNR_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw pnr::DomainError("PNR_SEED: not an unsigned integer");
        }
    }
    return opts.seed;
}

pnr::ProbVector parse_initial(const std::string& spec, int n_max) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (kind == "fock") {
        int n = 0;
        try {
            n = std::stoi(arg);
        } catch (const std::exception&) {
            throw pnr::DomainError("--initial fock:<n>: bad photon number '" + arg + "'");
        }
        if (n < 0 || n >= n_max)
            throw pnr::DomainError("--initial: fock state outside [0, " +
                                   std::to_string(n_max) + ")");
        Eigen::VectorXd p = Eigen::VectorXd::Zero(n_max);
        p[n] = 1.0;
        return pnr::ProbVector(std::move(p), pnr::Label::ideal);
    }
    if (kind == "coherent") {
        double alpha_sq = 0.0;
        try {
            alpha_sq = std::stod(arg);
        } catch (const std::exception&) {
            throw pnr::DomainError("--initial coherent:<mean photons>: bad value '" + arg + "'");
        }
        const auto c = pnr::coherent_distribution(alpha_sq, n_max);
        if (c.truncation_warning)
            std::fprintf(stderr,
                         "warning: coherent state truncated weight %.4f above threshold\n",
                         c.truncated_weight);
        return c.dist;
    }
    if (kind == "csv") {
        auto v = pnr::probvector_from_csv(pnr::read_file(arg), pnr::Label::ideal);
        if (v.size() != n_max)
            throw pnr::DomainError("--initial csv: expected " + std::to_string(n_max) +
                                   " entries, got " + std::to_string(v.size()));
        return v;
    }
    throw pnr::DomainError("--initial: expected fock:<n>, coherent:<mean photons>, or csv:<path>");
}

pnr::ProbVector load_histogram(const std::string& path, pnr::Label label) {
    auto hist = pnr::probvector_from_csv(pnr::read_file(path), label);
    const double sum = hist.p.sum();
    if (std::abs(sum - 1.0) > 1e-9) {
        std::fprintf(stderr, "warning: %s sums to %.6g; normalizing\n", path.c_str(), sum);
        hist.p /= sum;
    }
    return hist;
}

std::vector<std::string> split_list(const std::string& list) {
    std::vector<std::string> out;
    std::stringstream in(list);
    std::string item;
    while (std::getline(in, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

nlohmann::json reset_to_json(const pnr::ResetModel& reset) {
    nlohmann::json j{{"kind", pnr::to_string(reset.kind)},
                     {"mean_attempts", reset.mean_attempts},
                     {"attempt_duration_exposure", reset.attempt_duration_exposure}};
    if (!reset.empirical_pmf.empty()) j["empirical_pmf"] = reset.empirical_pmf;
    if (reset.attempts_per_photon != 0.0) j["attempts_per_photon"] = reset.attempts_per_photon;
    return j;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOpts {
    CommonOpts common;
    std::string params_path;
    std::string initial = "fock:0";
    long long shots = 100000;
    std::string reset_kind = "constant";
    double reset_mean = 2.05;
    double reset_attempt_exposure = 0.0046 / 2.05;
    std::string reset_pmf;
    bool emit_shots = false;
    std::string out_prefix;
};

int run_simulate(const SimulateOpts& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto params = pnr::load_params(opts.params_path);

    pnr::ResetModel reset;
    reset.kind = pnr::reset_kind_from_string(opts.reset_kind);
    reset.mean_attempts = opts.reset_mean;
    reset.attempt_duration_exposure = opts.reset_attempt_exposure;
    if (reset.kind == pnr::ResetKind::empirical) {
        if (opts.reset_pmf.empty())
            throw pnr::DomainError("--reset-pmf: required for the empirical reset model");
        for (const auto& tok : split_list(opts.reset_pmf))
            reset.empirical_pmf.push_back(std::stod(tok));
        reset.mean_attempts = reset.mean();
    }
    validate(reset);

    const auto initial = parse_initial(opts.initial, params.n_max());
    const auto seed = resolve_seed(opts.common);

    pnr::EnsembleOptions ensemble_opts;
    ensemble_opts.keep_shots = opts.emit_shots;
    ensemble_opts.threads = opts.common.threads;
    const auto result =
        pnr::simulate_ensemble(params, reset, initial, opts.shots, seed, ensemble_opts);

    const std::string hist_path = opts.out_prefix + ".hist.csv";
    pnr::write_file(hist_path, pnr::probvector_to_csv(result.histogram));
    if (opts.emit_shots)
        pnr::write_file(opts.out_prefix + ".shots.jsonl", pnr::shots_to_jsonl(result.shots));

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::json meta{{"verb", "simulate"},
                        {"seed", seed},
                        {"params_hash", pnr::params_hash(params)},
                        {"params_file", opts.params_path},
                        {"initial", opts.initial},
                        {"shots", opts.shots},
                        {"reset_model", reset_to_json(reset)},
                        {"threads", opts.common.threads},
                        {"emit_shots", opts.emit_shots},
                        {"elapsed_seconds", elapsed},
                        {"schema_version", 1}};
    pnr::write_file(opts.out_prefix + ".meta.json", meta.dump(2) + "\n");

    if (opts.common.format == "json")
        std::printf("%s\n", nlohmann::json{{"hist", hist_path}, {"shots", opts.shots},
                                           {"seed", seed}}
                                .dump()
                                .c_str());
    else
        std::printf("wrote %s (%lld shots, seed %llu)\n", hist_path.c_str(), opts.shots,
                    static_cast<unsigned long long>(seed));
    return 0;
}

// ---------------------------------------------------------------------------
// build-model

struct BuildModelOpts {
    CommonOpts common;
    std::string params_path;
    std::string out_path;
    std::string tidy_path;
    double cond_threshold = 1e6;
};

int run_build_model(const BuildModelOpts& opts) {
    const auto params = pnr::load_params(opts.params_path);
    const auto c = pnr::confusion_matrix(params, params.n_max(), opts.common.threads);
    pnr::save_confusion(opts.out_path, c);

    double cond = 0.0;
    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.c);
        const auto& sv = svd.singularValues();
        cond = sv[sv.size() - 1] > 0.0 ? sv[0] / sv[sv.size() - 1]
                                       : std::numeric_limits<double>::infinity();
    }
    if (cond > opts.cond_threshold)
        std::fprintf(stderr,
                     "warning: condition number %.3g exceeds %.3g; inversion will be refused\n",
                     cond, opts.cond_threshold);

    nlohmann::json meta{{"verb", "build-model"},
                        {"params_hash", c.params_hash},
                        {"params_file", opts.params_path},
                        {"n_max", c.n_max()},
                        {"condition_number", cond},
                        {"schema_version", 1}};
    pnr::write_file(opts.out_path + ".meta.json", meta.dump(2) + "\n");

    if (!opts.tidy_path.empty()) {
        std::string tidy = "outcome,input,p\n";
        char buf[64];
        for (int i = 0; i < c.n_max(); ++i)
            for (int j = 0; j < c.n_max(); ++j) {
                std::snprintf(buf, sizeof(buf), "%d,%d,%.17g\n", i, j, c.c(i, j));
                tidy += buf;
            }
        pnr::write_file(opts.tidy_path, tidy);
    }

    if (opts.common.format == "json")
        std::printf("%s\n",
                    nlohmann::json{{"model", opts.out_path}, {"cond", cond}}.dump().c_str());
    else
        std::printf("wrote %s (cond %.4g)\n", opts.out_path.c_str(), cond);
    return 0;
}

// ---------------------------------------------------------------------------
// mitigate

struct MitigateOpts {
    CommonOpts common;
    std::string model_path;
    std::string params_path;
    std::string hist_path;
    std::string ideal_path;
    std::string out_path;
    double cond_threshold = 1e6;
};

int run_mitigate(const MitigateOpts& opts) {
    if (opts.model_path.empty() == opts.params_path.empty())
        throw pnr::DomainError("mitigate: exactly one of --model or --params is required");

    pnr::ConfusionMatrix c;
    if (!opts.model_path.empty()) {
        c = pnr::load_confusion(opts.model_path);
    } else {
        const auto params = pnr::load_params(opts.params_path);
        c = pnr::confusion_matrix(params, params.n_max(), opts.common.threads);
    }

    const auto measured = load_histogram(opts.hist_path, pnr::Label::measured);
    if (measured.size() != c.n_max())
        throw pnr::DomainError("mitigate: histogram length " + std::to_string(measured.size()) +
                               " does not match model dimension " + std::to_string(c.n_max()));

    const auto inversion = pnr::invert_confusion(c, opts.cond_threshold);
    const auto result = pnr::mitigate(inversion, measured);
    pnr::write_file(opts.out_path, pnr::probvector_to_csv(result.mitigated));

    nlohmann::json report{{"verb", "mitigate"},
                          {"cond", inversion.condition_number},
                          {"inverse_residual_max", inversion.residual_max},
                          {"residual_norm", result.residual_norm},
                          {"params_hash", c.params_hash},
                          {"hist_file", opts.hist_path},
                          {"out_file", opts.out_path},
                          {"schema_version", 1}};
    if (!opts.ideal_path.empty()) {
        const auto ideal = load_histogram(opts.ideal_path, pnr::Label::ideal);
        if (ideal.size() != c.n_max())
            throw pnr::DomainError("mitigate: ideal length does not match model dimension");
        report["tvd_pre"] = pnr::tvd(measured, ideal);
        report["tvd_post"] = pnr::tvd(result.mitigated, ideal);
    }

    std::filesystem::path report_path(opts.out_path);
    report_path.replace_extension(".report.json");
    pnr::write_file(report_path.string(), report.dump(2) + "\n");

    if (opts.common.format == "json")
        std::printf("%s\n", report.dump().c_str());
    else if (report.contains("tvd_pre"))
        std::printf("wrote %s (cond %.4g, tvd %.4f -> %.4f)\n", opts.out_path.c_str(),
                    inversion.condition_number, report["tvd_pre"].get<double>(),
                    report["tvd_post"].get<double>());
    else
        std::printf("wrote %s (cond %.4g)\n", opts.out_path.c_str(),
                    inversion.condition_number);
    return 0;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateOpts {
    CommonOpts common;
    std::string cal_path;      // CalibrationSet JSON
    std::string archive_path;  // single-bit shot archive JSONL
    std::string params_path;   // synthesize from known parameters
    long long shots = 10000;
    int bit = -1;
    int n_max = 16;
    double prep_exposure = 0.0040;
    double cond_threshold = 1e6;
    std::string out_path;
};

pnr::CalibrationSet calibration_from_archive(const std::string& path, int n_max,
                                             double prep_exposure) {
    const auto shots = pnr::shots_from_jsonl(pnr::read_file(path));
    if (shots.empty())
        throw pnr::DomainError("calibrate: empty shot archive");
    std::vector<long long> zeros(static_cast<std::size_t>(n_max), 0);
    std::vector<long long> totals(static_cast<std::size_t>(n_max), 0);
    for (const auto& shot : shots) {
        if (shot.bits.size() != 1)
            throw pnr::DomainError(
                "calibrate: archive must contain single-bit calibration shots");
        if (shot.true_initial < 0 || shot.true_initial >= n_max)
            throw pnr::DomainError("calibrate: shot with true_initial outside [0, n_max)");
        totals[static_cast<std::size_t>(shot.true_initial)] += 1;
        zeros[static_cast<std::size_t>(shot.true_initial)] += shot.bits[0] == 0 ? 1 : 0;
    }
    pnr::CalibrationSet cal;
    cal.basis_overlap = Eigen::MatrixXd::Identity(n_max, n_max);
    cal.prep_exposure = prep_exposure;
    cal.p_cal.resize(2, n_max);
    cal.p_cal_variance.resize(2, n_max);
    for (int j = 0; j < n_max; ++j) {
        if (totals[static_cast<std::size_t>(j)] == 0)
            throw pnr::DomainError("calibrate: no shots for prepared state " +
                                   std::to_string(j));
        const double n = static_cast<double>(totals[static_cast<std::size_t>(j)]);
        const double p0 = static_cast<double>(zeros[static_cast<std::size_t>(j)]) / n;
        cal.p_cal(0, j) = p0;
        cal.p_cal(1, j) = 1.0 - p0;
        cal.p_cal_variance(0, j) = p0 * (1.0 - p0) / n;
        cal.p_cal_variance(1, j) = p0 * (1.0 - p0) / n;
    }
    return cal;
}

int run_calibrate(const CalibrateOpts& opts) {
    const int sources = (!opts.cal_path.empty() ? 1 : 0) + (!opts.archive_path.empty() ? 1 : 0) +
                        (!opts.params_path.empty() ? 1 : 0);
    if (sources != 1)
        throw pnr::DomainError(
            "calibrate: exactly one of --cal, --archive, or --params is required");

    nlohmann::json bits = nlohmann::json::array();
    std::string csv = "bit,eps_g,eps_g_err,eps_e,eps_e_err\n";
    char line[160];

    auto report_bit = [&](int bit, const pnr::EmissionRecovery& recovery) {
        const auto rates = pnr::extract_rates(recovery, bit);
        bits.push_back(nlohmann::json{{"bit", bit},
                                      {"eps_g", rates.eps_g},
                                      {"eps_g_err", rates.eps_g_err},
                                      {"eps_e", rates.eps_e},
                                      {"eps_e_err", rates.eps_e_err},
                                      {"basis_condition", recovery.basis_condition}});
        std::snprintf(line, sizeof(line), "%d,%.17g,%.17g,%.17g,%.17g\n", bit, rates.eps_g,
                      rates.eps_g_err, rates.eps_e, rates.eps_e_err);
        csv += line;
    };

    if (!opts.cal_path.empty()) {
        if (opts.bit < 0)
            throw pnr::DomainError("calibrate: --bit is required with --cal");
        const auto cal = pnr::calibration_from_json(
            nlohmann::json::parse(pnr::read_file(opts.cal_path)));
        report_bit(opts.bit,
                   pnr::recover_emission(cal, cal.n_basis(), opts.cond_threshold));
    } else if (!opts.archive_path.empty()) {
        if (opts.bit < 0)
            throw pnr::DomainError("calibrate: --bit is required with --archive");
        const auto cal =
            calibration_from_archive(opts.archive_path, opts.n_max, opts.prep_exposure);
        report_bit(opts.bit, pnr::recover_emission(cal, opts.n_max, opts.cond_threshold));
    } else {
        const auto truth = pnr::load_params(opts.params_path);
        const auto seed = resolve_seed(opts.common);
        const int lo = opts.bit >= 0 ? opts.bit : 0;
        const int hi = opts.bit >= 0 ? opts.bit + 1 : truth.bit_count;
        for (int bit = lo; bit < hi; ++bit) {
            const auto cal = pnr::synthesize_calibration(
                truth, bit, opts.shots, seed + static_cast<std::uint64_t>(bit),
                opts.prep_exposure);
            report_bit(bit,
                       pnr::recover_emission(cal, truth.n_max(), opts.cond_threshold));
        }
    }

    const nlohmann::json out{{"verb", "calibrate"}, {"bits", bits}, {"schema_version", 1}};
    const std::string text = opts.common.format == "json" ? out.dump(2) + "\n" : csv;
    if (opts.out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        pnr::write_file(opts.out_path, text);
    return 0;
}

// ---------------------------------------------------------------------------
// info-bits

struct InfoBitsOpts {
    CommonOpts common;
    std::string params_path;
};

int run_info_bits(const InfoBitsOpts& opts) {
    const auto params = pnr::load_params(opts.params_path);
    const auto c = pnr::confusion_matrix(params, params.n_max(), opts.common.threads);
    const double bits = pnr::extracted_bits(c);
    if (opts.common.format == "json")
        std::printf("%s\n", nlohmann::json{{"extracted_bits", bits},
                                           {"params_hash", c.params_hash}}
                                .dump()
                                .c_str());
    else
        std::printf("%.4f\n", bits);
    return 0;
}

// ---------------------------------------------------------------------------
// cond-sweep

struct CondSweepOpts {
    CommonOpts common;
    double from = 0.001;
    double to = 0.6;
    int points = 50;
    double eps_g = 0.01;
    double eps_e = 0.03;
    int bit_count = 4;
    std::string spacing = "log";
    std::string out_path;
};

int run_cond_sweep(const CondSweepOpts& opts) {
    if (opts.points < 1)
        throw pnr::DomainError("cond-sweep: --points must be >= 1");
    if (opts.to < opts.from)
        throw pnr::DomainError("cond-sweep: --to must be >= --from");
    if (opts.spacing == "log" && opts.from <= 0.0)
        throw pnr::DomainError("cond-sweep: log spacing requires --from > 0");

    std::vector<double> exposures;
    for (int k = 0; k < opts.points; ++k) {
        const double s =
            opts.points == 1 ? 0.0 : static_cast<double>(k) / (opts.points - 1);
        exposures.push_back(opts.spacing == "log"
                                ? opts.from * std::pow(opts.to / opts.from, s)
                                : opts.from + (opts.to - opts.from) * s);
    }
    const auto series = pnr::condition_sweep(exposures, opts.bit_count, opts.eps_g,
                                             opts.eps_e, opts.common.threads);

    std::string text;
    if (opts.common.format == "json") {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& pt : series)
            arr.push_back({{"exposure", pt.exposure}, {"cond", pt.condition_number}});
        text = arr.dump(2) + "\n";
    } else {
        text = "exposure,cond\n";
        char buf[64];
        for (const auto& pt : series) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", pt.exposure,
                          pt.condition_number);
            text += buf;
        }
    }
    if (opts.out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        pnr::write_file(opts.out_path, text);
    return 0;
}

// ---------------------------------------------------------------------------
// multimode

struct MultimodeOpts {
    CommonOpts common;
    std::string params_list;
    std::string inverse_list;
    int modes = 0;
    std::string meas_path;
    std::string targets_path;
    int order_q = -1;
    std::uint64_t budget = 50'000'000;
    double cond_threshold = 1e6;
    std::string out_path;
};

int run_multimode(const MultimodeOpts& opts) {
    if (opts.params_list.empty() == opts.inverse_list.empty())
        throw pnr::DomainError(
            "multimode: exactly one of --params or --inverse is required");
    if (opts.targets_path.empty() == (opts.order_q < 0))
        throw pnr::DomainError("multimode: exactly one of --targets or --q is required");

    std::vector<Eigen::MatrixXd> inverses;
    if (!opts.inverse_list.empty()) {
        for (const auto& path : split_list(opts.inverse_list))
            inverses.push_back(pnr::matrix_from_csv(pnr::read_file(path)));
    } else {
        for (const auto& path : split_list(opts.params_list)) {
            const auto params = pnr::load_params(path);
            const auto c = pnr::confusion_matrix(params, params.n_max(), opts.common.threads);
            inverses.push_back(pnr::invert_confusion(c, opts.cond_threshold).inverse);
        }
    }
    if (inverses.empty())
        throw pnr::DomainError("multimode: no per-mode models given");
    if (opts.modes > 0 && inverses.size() == 1)
        inverses.assign(static_cast<std::size_t>(opts.modes), inverses.front());
    else if (opts.modes > 0 && static_cast<int>(inverses.size()) != opts.modes)
        throw pnr::DomainError("multimode: --modes disagrees with the model list");

    const int modes = static_cast<int>(inverses.size());
    const int n_max = static_cast<int>(inverses.front().rows());
    auto meas = pnr::sparse_from_jsonl(pnr::read_file(opts.meas_path));
    pnr::validate(meas, modes, n_max);

    pnr::SparseDist mitigated;
    if (opts.order_q >= 0) {
        auto spec = pnr::make_expansion(inverses, opts.order_q, opts.budget);
        mitigated = pnr::mitigate_truncated(spec, meas, opts.common.threads);
    } else {
        const auto targets = pnr::sparse_from_jsonl(pnr::read_file(opts.targets_path));
        for (const auto& [digits, ignored] : targets.entries) {
            if (static_cast<int>(digits.size()) != modes)
                throw pnr::DomainError("multimode: target with wrong mode count");
            mitigated.entries[digits] =
                pnr::mitigate_element(inverses, pnr::MultiIndex{digits}, meas);
        }
    }

    const std::string text = pnr::sparse_to_jsonl(mitigated);
    if (opts.out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        pnr::write_file(opts.out_path, text);
    if (opts.common.format == "json" && !opts.out_path.empty())
        std::printf("%s\n", nlohmann::json{{"entries", mitigated.entries.size()},
                                           {"out", opts.out_path}}
                                .dump()
                                .c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bitwise photon-number readout: simulation, calibration, and mitigation"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SimulateOpts sim;
    auto* sim_cmd = app.add_subcommand("simulate", "sample measurement shots from the model");
    sim_cmd->add_option("--params", sim.params_path, "detector params JSON")->required();
    sim_cmd->add_option("--initial", sim.initial,
                        "initial state: fock:<n> | coherent:<mean photons> | csv:<path>");
    sim_cmd->add_option("--shots", sim.shots, "number of shots");
    sim_cmd->add_option("--reset-model", sim.reset_kind,
                        "constant | geometric | empirical");
    sim_cmd->add_option("--reset-mean", sim.reset_mean, "mean reset attempts");
    sim_cmd->add_option("--reset-attempt-exposure", sim.reset_attempt_exposure,
                        "decay exposure per reset attempt");
    sim_cmd->add_option("--reset-pmf", sim.reset_pmf,
                        "comma-separated pmf over 1..K attempts (empirical model)");
    sim_cmd->add_flag("--emit-shots", sim.emit_shots, "write the per-shot archive");
    sim_cmd->add_option("--out", sim.out_prefix, "output prefix")->required();
    add_common(sim_cmd, sim.common);

    BuildModelOpts build;
    auto* build_cmd = app.add_subcommand("build-model", "assemble the confusion matrix");
    build_cmd->add_option("--params", build.params_path, "detector params JSON")->required();
    build_cmd->add_option("--out", build.out_path, "confusion matrix CSV path")->required();
    build_cmd->add_option("--tidy", build.tidy_path, "also write outcome,input,p rows");
    build_cmd->add_option("--cond-threshold", build.cond_threshold,
                          "warn above this condition number");
    add_common(build_cmd, build.common);

    MitigateOpts mit;
    auto* mit_cmd = app.add_subcommand("mitigate", "deconvolve measurement errors");
    mit_cmd->add_option("--model", mit.model_path, "prebuilt confusion matrix CSV");
    mit_cmd->add_option("--params", mit.params_path, "detector params JSON (build the model)");
    mit_cmd->add_option("--hist", mit.hist_path, "measured histogram CSV")->required();
    mit_cmd->add_option("--ideal", mit.ideal_path, "ideal histogram CSV for TVD reporting");
    mit_cmd->add_option("--out", mit.out_path, "mitigated histogram CSV")->required();
    mit_cmd->add_option("--cond-threshold", mit.cond_threshold,
                        "refuse inversion above this condition number");
    add_common(mit_cmd, mit.common);

    CalibrateOpts cal;
    auto* cal_cmd = app.add_subcommand("calibrate", "recover per-bit error rates");
    cal_cmd->add_option("--cal", cal.cal_path, "calibration set JSON");
    cal_cmd->add_option("--archive", cal.archive_path, "single-bit shot archive JSONL");
    cal_cmd->add_option("--params", cal.params_path, "synthesize from these parameters");
    cal_cmd->add_option("--shots", cal.shots, "shots per prepared state when synthesizing");
    cal_cmd->add_option("--bit", cal.bit, "bit index (all bits when synthesizing)");
    cal_cmd->add_option("--nmax", cal.n_max, "Fock truncation for archive mode");
    cal_cmd->add_option("--prep-exposure", cal.prep_exposure,
                        "decay exposure before the calibration bit");
    cal_cmd->add_option("--cond-threshold", cal.cond_threshold,
                        "refuse bases above this condition number");
    cal_cmd->add_option("--out", cal.out_path, "write the report here instead of stdout");
    add_common(cal_cmd, cal.common);

    InfoBitsOpts info;
    auto* info_cmd = app.add_subcommand("info-bits", "bits of information extracted per shot");
    info_cmd->add_option("--params", info.params_path, "detector params JSON")->required();
    add_common(info_cmd, info.common);

    CondSweepOpts sweep;
    auto* sweep_cmd =
        app.add_subcommand("cond-sweep", "condition number vs storage error rate");
    sweep_cmd->add_option("--from", sweep.from, "lowest exposure");
    sweep_cmd->add_option("--to", sweep.to, "highest exposure");
    sweep_cmd->add_option("--points", sweep.points, "number of sweep points");
    sweep_cmd->add_option("--eps-g", sweep.eps_g, "readout error rate eps_g");
    sweep_cmd->add_option("--eps-e", sweep.eps_e, "readout error rate eps_e");
    sweep_cmd->add_option("--bits", sweep.bit_count, "bit count B");
    sweep_cmd->add_option("--spacing", sweep.spacing, "log | linear")
        ->check(CLI::IsMember({"log", "linear"}));
    sweep_cmd->add_option("--out", sweep.out_path, "write the series here instead of stdout");
    add_common(sweep_cmd, sweep.common);

    MultimodeOpts multi;
    auto* multi_cmd =
        app.add_subcommand("multimode", "sparse multi-mode mitigation via Kronecker inverses");
    multi_cmd->add_option("--params", multi.params_list,
                          "comma-separated per-mode params JSON files");
    multi_cmd->add_option("--inverse", multi.inverse_list,
                          "comma-separated per-mode inverse CSV files");
    multi_cmd->add_option("--modes", multi.modes, "replicate a single model this many times");
    multi_cmd->add_option("--meas", multi.meas_path, "measured sparse distribution JSONL")
        ->required();
    multi_cmd->add_option("--targets", multi.targets_path,
                          "JSONL of digit tuples to mitigate");
    multi_cmd->add_option("--q", multi.order_q, "truncation order for whole-support expansion");
    multi_cmd->add_option("--budget", multi.budget, "entry budget per truncated column");
    multi_cmd->add_option("--cond-threshold", multi.cond_threshold,
                          "refuse inversion above this condition number");
    multi_cmd->add_option("--out", multi.out_path, "mitigated entries JSONL");
    add_common(multi_cmd, multi.common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    }

    try {
        if (sim_cmd->parsed()) return run_simulate(sim);
        if (build_cmd->parsed()) return run_build_model(build);
        if (mit_cmd->parsed()) return run_mitigate(mit);
        if (cal_cmd->parsed()) return run_calibrate(cal);
        if (info_cmd->parsed()) return run_info_bits(info);
        if (sweep_cmd->parsed()) return run_cond_sweep(sweep);
        if (multi_cmd->parsed()) return run_multimode(multi);
    } catch (const pnr::IllConditioned& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitNumericalGuard;
    } catch (const pnr::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInput;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
