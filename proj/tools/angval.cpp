// angval: principal angles, autonomous angular values, finite-horizon
// estimators and random-cocycle experiments over the shared matrix format.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "angval/autonomous.hpp"
#include "angval/errors.hpp"
#include "angval/geometry.hpp"
#include "angval/matrix_io.hpp"
#include "angval/random_cocycle.hpp"
#include "angval/rng.hpp"
#include "angval/spectral.hpp"
#include "angval/theta2d.hpp"
#include "angval/trajectory.hpp"

using json = nlohmann::ordered_json;
using namespace angval;

namespace {

std::string fmt(double x) { return format_double(x); }

struct Output {
    std::string path;  // empty -> stdout
    void write(const std::string& payload) const {
        if (path.empty()) {
            std::cout << payload;
            return;
        }
        std::ofstream f(path);
        if (!f) throw ParseError("cannot open `" + path + "` for writing");
        f << payload;
    }
};

std::uint64_t seed_or_env(std::uint64_t cli_seed, bool seed_given) {
    if (seed_given) return cli_seed;
    if (const char* env = std::getenv("ANGVAL_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return cli_seed;
}

Frame load_frame(const std::string& path, std::vector<std::string>& warnings) {
    Eigen::MatrixXd m = read_matrix_file(path);
    Eigen::MatrixXd g = m.transpose() * m;
    g.diagonal().array() -= 1.0;
    if (g.cwiseAbs().maxCoeff() > 1e-12) {
        warnings.push_back(path + ": columns not orthonormal, orthonormalizing");
        return orthonormalize(m);
    }
    return Frame(m);
}

json eigenvalue_list(const std::vector<std::complex<double>>& vals) {
    json out = json::array();
    for (const auto& v : vals) out.push_back({v.real(), v.imag()});
    return out;
}

json theta_report_json(const Theta2DReport& rep) {
    json j;
    j["rho"] = rep.rho;
    j["phi"] = rep.phi;
    j["phi_reduced"] = rep.phi_reduced;
    j["skew"] = rep.skew;
    j["case"] = to_string(rep.tag);
    if (rep.q > 0) {
        j["p"] = rep.p;
        j["q"] = rep.q;
    }
    j["theta1"] = rep.theta1;
    if (rep.theta1_min) j["theta1_min"] = *rep.theta1_min;
    if (rep.argmax_theta) j["argmax_theta"] = *rep.argmax_theta;
    if (rep.quad_error) j["quad_error"] = *rep.quad_error;
    if (rep.sensitive) {
        j["sensitive"] = true;
        if (rep.other_branch) j["other_branch"] = *rep.other_branch;
        j["note"] = rep.note;
    }
    return j;
}

json auto_report_json(const AutoThetaReport& rep) {
    json j;
    j["dimension"] = rep.dimension;
    j["theta1"] = rep.theta1;
    j["opposite_reals"] = rep.opposite_reals;
    j["eigencond_ok"] = rep.eigencond_ok;
    j["warnings"] = rep.warnings;
    j["blocks"] = json::array();
    for (const auto& b : rep.blocks) {
        json bj;
        bj["modulus"] = b.modulus;
        bj["dim"] = b.dim;
        bj["kind"] = to_string(b.kind);
        bj["eigenvalues"] = eigenvalue_list(b.eigenvalues);
        bj["method"] = to_string(b.method);
        bj["theta1"] = b.theta1;
        if (b.normal_form) {
            bj["r"] = b.normal_form->r;
            bj["rho"] = b.normal_form->rho;
            bj["phi"] = b.normal_form->phi;
        }
        if (b.theta_report) {
            bj["skew"] = b.theta_report->skew;
            bj["case"] = to_string(b.theta_report->tag);
        }
        j["blocks"].push_back(bj);
    }
    return j;
}

json estimates_json(const AngularEstimates& est) {
    json j;
    j["inner_upper"] = est.inner_upper;
    j["inner_lower"] = est.inner_lower;
    j["outer_upper"] = est.outer_upper;
    j["outer_lower"] = est.outer_lower;
    j["uniform_inner_upper"] = est.uniform_inner_upper;
    j["uniform_inner_lower"] = est.uniform_inner_lower;
    j["uniform_outer_upper"] = est.uniform_outer_upper;
    j["uniform_outer_lower"] = est.uniform_outer_lower;
    j["ladder"] = est.ladder;
    j["inner_trace"] = est.inner_trace;
    j["uniform_sup_trace"] = est.uniform_sup_trace;
    j["uniform_inf_trace"] = est.uniform_inf_trace;
    j["argmax_outer_trace"] = est.argmax_outer_trace;
    json cols = json::array();
    for (Eigen::Index i = 0; i < est.argmax_outer.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < est.argmax_outer.cols(); ++k) {
            row.push_back(est.argmax_outer(i, k));
        }
        cols.push_back(row);
    }
    j["argmax_outer"] = cols;
    return j;
}

std::string dump_json(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- pangles

int cmd_pangles(const std::string& pfile, const std::string& qfile,
                const std::string& format, const Output& out) {
    std::vector<std::string> warnings;
    Frame p = load_frame(pfile, warnings);
    Frame q = load_frame(qfile, warnings);
    PrincipalAngleSet set = principal_angles(p, q);
    double dist = grassmann_distance(p, q);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";

    if (format == "json") {
        json j;
        j["angles"] = set.angles;
        json cosines = json::array();
        for (double a : set.angles) cosines.push_back(std::cos(a));
        j["cosines"] = cosines;
        j["max_angle"] = set.angles.back();
        j["sin_distance"] = dist;
        out.write(dump_json(j));
    } else {
        std::ostringstream os;
        os << "index,angle,cosine\n";
        for (std::size_t i = 0; i < set.angles.size(); ++i) {
            os << i + 1 << ',' << fmt(set.angles[i]) << ',' << fmt(std::cos(set.angles[i]))
               << '\n';
        }
        os << "# max_angle=" << fmt(set.angles.back()) << " sin_distance=" << fmt(dist)
           << '\n';
        out.write(os.str());
    }
    return 0;
}

// -------------------------------------------------------------- theta-auto

int cmd_theta_auto(const std::string& afile, const AutoThetaOptions& opts,
                   const std::string& format, const Output& out) {
    Eigen::MatrixXd a = read_matrix_file(afile);
    AutoThetaReport rep = theta1_autonomous(a, opts);
    if (format == "json") {
        out.write(dump_json(auto_report_json(rep)));
    } else {
        std::ostringstream os;
        os << "modulus,dim,kind,method,r,rho,phi,skew,case,theta1\n";
        for (const auto& b : rep.blocks) {
            os << fmt(b.modulus) << ',' << b.dim << ',' << to_string(b.kind) << ','
               << to_string(b.method) << ',';
            if (b.normal_form) {
                os << fmt(b.normal_form->r) << ',' << fmt(b.normal_form->rho) << ','
                   << fmt(b.normal_form->phi) << ',';
            } else {
                os << ",,,";
            }
            if (b.theta_report) {
                os << fmt(b.theta_report->skew) << ',' << to_string(b.theta_report->tag)
                   << ',';
            } else {
                os << ",,";
            }
            os << fmt(b.theta1) << '\n';
        }
        os << "# theta1=" << fmt(rep.theta1) << " opposite_reals=" << rep.opposite_reals
           << " eigencond_ok=" << rep.eigencond_ok << '\n';
        out.write(os.str());
    }
    return 0;
}

// ---------------------------------------------------------- scan-resonance

int cmd_scan(double rho_lo, double rho_hi, int rho_steps, double phi_lo, double phi_hi,
             int phi_steps, const Theta1Options& topts, int jobs,
             const std::string& format, const Output& out) {
    if (!(rho_lo > 0.0 && rho_hi <= 1.0 && rho_lo <= rho_hi)) {
        throw ParamRange("rho grid must lie in (0,1]");
    }
    if (!(phi_lo > 0.0 && phi_hi <= kPi / 2.0 && phi_lo <= phi_hi)) {
        throw ParamRange("phi grid must lie in (0, pi/2]");
    }
    struct Row {
        double rho, phi, phi_c;
        Theta2DReport rep;
    };
    std::vector<double> rhos, phis;
    for (int i = 0; i < rho_steps; ++i) {
        rhos.push_back(rho_steps == 1 ? rho_lo
                                      : rho_lo + (rho_hi - rho_lo) * i / (rho_steps - 1));
    }
    for (int i = 0; i < phi_steps; ++i) {
        phis.push_back(phi_steps == 1 ? phi_lo
                                      : phi_lo + (phi_hi - phi_lo) * i / (phi_steps - 1));
    }
    std::vector<Row> rows(rhos.size() * phis.size());
    auto work = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t idx = lo; idx < hi; ++idx) {
            double r = rhos[idx / phis.size()];
            double ph = phis[idx % phis.size()];
            rows[idx] = {r, ph, std::asin(2.0 / (r + 1.0 / r)), theta1_normal(r, ph, topts)};
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1) {
        work(0, rows.size());
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (rows.size() + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            std::size_t lo = t * chunk, hi = std::min(rows.size(), lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(work, lo, hi);
        }
        for (auto& th : pool) th.join();
    }

    if (format == "json") {
        json arr = json::array();
        for (const auto& r : rows) {
            json j = theta_report_json(r.rep);
            j["phi_c"] = r.phi_c;
            arr.push_back(j);
        }
        out.write(dump_json(arr));
    } else {
        std::ostringstream os;
        os << "rho,phi,case,theta1,theta1_min,skew,phi_c,sensitive,other_branch\n";
        for (const auto& r : rows) {
            os << fmt(r.rho) << ',' << fmt(r.phi) << ',' << to_string(r.rep.tag) << ','
               << fmt(r.rep.theta1) << ','
               << (r.rep.theta1_min ? fmt(*r.rep.theta1_min) : "") << ','
               << fmt(r.rep.skew) << ',' << fmt(r.phi_c) << ',' << (r.rep.sensitive ? 1 : 0)
               << ',' << (r.rep.other_branch ? fmt(*r.rep.other_branch) : "") << '\n';
        }
        out.write(os.str());
    }
    return 0;
}

// ------------------------------------------------------------- trajectory

MatrixSequence make_sequence(const std::string& kind, double phi, double phi0, double phi1,
                             double a, double b, const std::string& file, bool periodic) {
    if (kind == "rotation") return rotation_sequence(phi);
    if (kind == "example1") return example1_sequence(phi0, phi1);
    if (kind == "example2") return example2_sequence();
    if (kind == "henon") return henon_sequence(a, b);
    if (kind == "constant") return constant_sequence(read_matrix_file(file));
    if (kind == "file") return from_file_sequence(file, periodic);
    throw ParamRange("unknown sequence kind `" + kind + "`");
}

int cmd_trajectory(const MatrixSequence& seq, EstimatorConfig cfg, bool witnesses,
                   long angle_log, const std::string& format, const Output& out) {
    if (witnesses) {
        for (int ell = 2; ell <= 10; ++ell) {
            cfg.search.extra_frames.push_back(example2_witness(ell).columns());
        }
    }
    AngularEstimates est = estimate_angular_values(seq, cfg);

    std::vector<double> log_values;
    if (angle_log > 0) {
        Frame v0 = est.argmax_outer.cols() > 0
                       ? Frame(est.argmax_outer)
                       : random_frame(seq.dim(), cfg.s, rng::derive(cfg.seed, 1));
        log_values = orbit_angles(seq, v0, angle_log);
    }

    if (format == "json") {
        json j;
        j["sequence"] = seq.label();
        j["s"] = cfg.s;
        j["estimates"] = estimates_json(est);
        if (!log_values.empty()) j["angle_log"] = log_values;
        out.write(dump_json(j));
    } else {
        std::ostringstream os;
        os << "n,inner_trace,uniform_sup_trace,uniform_inf_trace,argmax_outer_trace\n";
        for (std::size_t i = 0; i < est.ladder.size(); ++i) {
            os << est.ladder[i] << ',' << fmt(est.inner_trace[i]) << ','
               << fmt(est.uniform_sup_trace[i]) << ',' << fmt(est.uniform_inf_trace[i])
               << ',' << fmt(est.argmax_outer_trace[i]) << '\n';
        }
        os << "# inner_upper=" << fmt(est.inner_upper)
           << " inner_lower=" << fmt(est.inner_lower)
           << " outer_upper=" << fmt(est.outer_upper)
           << " outer_lower=" << fmt(est.outer_lower) << '\n';
        os << "# uniform_inner_upper=" << fmt(est.uniform_inner_upper)
           << " uniform_inner_lower=" << fmt(est.uniform_inner_lower)
           << " uniform_outer_upper=" << fmt(est.uniform_outer_upper)
           << " uniform_outer_lower=" << fmt(est.uniform_outer_lower) << '\n';
        if (!log_values.empty()) {
            os << "j,b_j\n";
            for (std::size_t i = 0; i < log_values.size(); ++i) {
                os << i + 1 << ',' << fmt(log_values[i]) << '\n';
            }
        }
        out.write(os.str());
    }
    return 0;
}

// ------------------------------------------------------------------ random

CocycleDriver driver_from_json(const std::string& spec_path, std::uint64_t default_seed) {
    std::ifstream f(spec_path);
    if (!f) throw ParseError("cannot open driver spec `" + spec_path + "`");
    json j;
    try {
        j = json::parse(f);
    } catch (const std::exception& e) {
        throw ParseError(spec_path + ": " + e.what());
    }
    std::string kind = j.value("kind", "");
    std::uint64_t seed = j.value("seed", default_seed);
    if (kind == "iid_angles") {
        return CocycleDriver::iid_angles(j.at("lo").get<double>(), j.at("hi").get<double>(),
                                         seed);
    }
    if (kind == "iid_finite_set") {
        std::vector<Eigen::MatrixXd> mats;
        for (const auto& mj : j.at("matrices")) {
            std::size_t rows = mj.size();
            std::size_t cols = mj.at(0).size();
            Eigen::MatrixXd m(rows, cols);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c) m(r, c) = mj.at(r).at(c).get<double>();
            mats.push_back(m);
        }
        std::vector<double> probs = j.at("probabilities").get<std::vector<double>>();
        return CocycleDriver::iid_finite_set(std::move(mats), std::move(probs), seed);
    }
    if (kind == "torus_rotation") {
        double alpha = j.value("alpha", (std::sqrt(5.0) - 1.0) / 2.0);
        double omega0 = j.value("omega0", 0.0);
        const auto& fam = j.at("family");
        std::string type = fam.at("type").get<std::string>();
        if (type != "rotation_sine") {
            throw ParseError("unsupported torus family `" + type +
                             "` (expected rotation_sine)");
        }
        double base = fam.at("base").get<double>();
        double amp = fam.value("amplitude", 0.0);
        auto family = [base, amp](double w) -> Eigen::MatrixXd {
            double phi = base + amp * std::sin(2.0 * kPi * w);
            Eigen::Matrix2d t;
            t << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
            return t;
        };
        return CocycleDriver::torus_rotation(alpha, family, 2, seed, omega0);
    }
    throw ParseError(spec_path + ": unknown driver kind `" + kind + "`");
}

int cmd_random(const CocycleDriver& driver, const EstimatorConfig& cfg, long n, int reps,
               bool inner, const std::string& format, const Output& out) {
    RandomEstimate est;
    if (inner) {
        est = inner_estimate(driver, cfg, reps);
    } else {
        Frame v0 = random_frame(driver.dim(), cfg.s, rng::derive(driver.seed(), 0xf0));
        est = birkhoff_outer(driver, v0, n, reps);
    }
    if (format == "json") {
        json j;
        j["kind"] = driver.kind();
        j["mode"] = inner ? "inner" : "outer";
        j["value"] = est.value;
        j["stderr"] = est.stderr_;
        j["n"] = est.n;
        j["reps"] = est.reps;
        if (!est.ladder.empty()) {
            j["ladder"] = est.ladder;
            j["trace"] = est.trace;
            j["trace_stderr"] = est.trace_stderr;
            j["monotone_trend"] = est.monotone_trend;
        }
        out.write(dump_json(j));
    } else {
        std::ostringstream os;
        os << "n,value,stderr\n";
        if (est.ladder.empty()) {
            os << est.n << ',' << fmt(est.value) << ',' << fmt(est.stderr_) << '\n';
        } else {
            for (std::size_t i = 0; i < est.ladder.size(); ++i) {
                os << est.ladder[i] << ',' << fmt(est.trace[i]) << ','
                   << fmt(est.trace_stderr[i]) << '\n';
            }
        }
        out.write(os.str());
    }
    return 0;
}

// ---------------------------------------------------------- random-matrix

int cmd_random_matrix(int dim, std::uint64_t seed, int bins, const AutoThetaOptions& opts,
                      const std::string& format, const Output& out) {
    Eigen::MatrixXd a = random_uniform_matrix(dim, seed);
    AutoThetaReport rep = theta1_autonomous(a, opts);
    std::vector<double> sorted;
    int complex_blocks = 0;
    for (const auto& b : rep.blocks) {
        sorted.push_back(b.theta1);
        if (b.kind == BlockKind::ComplexPair) ++complex_blocks;
    }
    std::sort(sorted.begin(), sorted.end());
    std::vector<long> hist(bins, 0);
    for (double v : sorted) {
        int k = std::min(bins - 1, static_cast<int>(v / (kPi / 2.0) * bins));
        ++hist[std::max(0, k)];
    }

    if (format == "json") {
        json j;
        j["dim"] = dim;
        j["seed"] = seed;
        j["theta1"] = rep.theta1;
        j["block_count"] = rep.blocks.size();
        j["complex_blocks"] = complex_blocks;
        j["sorted_theta1"] = sorted;
        json hj = json::array();
        for (int k = 0; k < bins; ++k) {
            hj.push_back({{"lo", kPi / 2.0 * k / bins},
                          {"hi", kPi / 2.0 * (k + 1) / bins},
                          {"count", hist[k]}});
        }
        j["histogram"] = hj;
        out.write(dump_json(j));
    } else {
        std::ostringstream os;
        os << "index,theta1\n";
        for (std::size_t i = 0; i < sorted.size(); ++i) {
            os << i + 1 << ',' << fmt(sorted[i]) << '\n';
        }
        os << "bin_lo,bin_hi,count\n";
        for (int k = 0; k < bins; ++k) {
            os << fmt(kPi / 2.0 * k / bins) << ',' << fmt(kPi / 2.0 * (k + 1) / bins) << ','
               << hist[k] << '\n';
        }
        os << "# theta1=" << fmt(rep.theta1) << " complex_blocks=" << complex_blocks
           << " blocks=" << rep.blocks.size() << '\n';
        out.write(os.str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"angular values of linear dynamical systems"};
    app.require_subcommand(1);

    std::string format = "csv";
    std::string out_path;
    std::uint64_t seed = 0x5eed;
    bool seed_given = false;
    int jobs = 1;
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--seed", seed, "RNG seed (fallback: ANGVAL_SEED env)")
        ->each([&](const std::string&) { seed_given = true; });
    app.add_option("--jobs", jobs, "worker threads for sweeps");

    AutoThetaOptions aopts;
    Theta1Options topts;

    // pangles
    auto* pang = app.add_subcommand("pangles", "principal angles between two frames");
    std::string pfile, qfile;
    pang->add_option("P", pfile, "frame file")->required();
    pang->add_option("Q", qfile, "frame file")->required();

    // theta-auto
    auto* tauto = app.add_subcommand("theta-auto", "first angular value of a matrix");
    std::string afile;
    tauto->add_option("A", afile, "matrix file")->required();
    tauto->add_option("--tol-mod", aopts.tol_mod_rel, "relative modulus grouping tolerance");
    tauto->add_option("--qmax", aopts.theta.q_max, "resonance search depth");
    tauto->add_option("--rational-tol", aopts.theta.rational_tol, "resonance tolerance");
    tauto->add_option("--quad-tol", aopts.theta.quad_tol, "quadrature tolerance");
    bool no_fallback = false;
    tauto->add_flag("--no-fallback", no_fallback, "fail instead of trajectory fallback");

    // scan-resonance
    auto* scan = app.add_subcommand("scan-resonance", "theta1 of A(rho,phi) over a grid");
    double rho_lo = 1.0 / 7.0, rho_hi = -1.0;
    double phi_lo = 0.01, phi_hi = kPi / 2.0;
    int phi_steps = 200, rho_steps = 1;
    scan->add_option("--rho", rho_lo, "rho (grid start)");
    scan->add_option("--rho-hi", rho_hi, "rho grid end (default: single rho)");
    scan->add_option("--rho-steps", rho_steps, "rho grid count");
    scan->add_option("--phi-lo", phi_lo, "phi grid start");
    scan->add_option("--phi-hi", phi_hi, "phi grid end");
    scan->add_option("--phi-steps", phi_steps, "phi grid count");
    scan->add_option("--qmax", topts.q_max, "resonance search depth");
    scan->add_option("--rational-tol", topts.rational_tol, "resonance tolerance");
    scan->add_option("--quad-tol", topts.quad_tol, "quadrature tolerance");
    bool scan_alt = false;
    scan->add_flag("--alt-branch", scan_alt,
                   "also evaluate the competing branch near resonances (slow)");

    // trajectory
    auto* traj = app.add_subcommand("trajectory", "finite-horizon angular value estimates");
    std::string kind;
    double tphi = 0.5, tphi0 = 0.3, tphi1 = 1.2, ha = 1.4, hb = 0.3;
    std::string seq_file;
    bool periodic = false, witnesses = false;
    int s_dim = 1;
    std::vector<long> ladder = {100, 1000, 10000};
    long k_window = 1000;
    int grid = 720, frames = 256;
    long angle_log = 0;
    traj->add_option("sequence", kind, "rotation|example1|example2|henon|constant|file")
        ->required();
    traj->add_option("--phi", tphi, "rotation angle");
    traj->add_option("--phi0", tphi0, "example1 first angle");
    traj->add_option("--phi1", tphi1, "example1 second angle");
    traj->add_option("--henon-a", ha, "henon parameter a");
    traj->add_option("--henon-b", hb, "henon parameter b");
    traj->add_option("--file", seq_file, "matrix file for constant/file kinds");
    traj->add_flag("--periodic", periodic, "repeat a file-backed sequence");
    traj->add_option("--s", s_dim, "subspace dimension");
    traj->add_option("--n-ladder", ladder, "increasing horizons")->delimiter(',');
    traj->add_option("--k-window", k_window, "shift window for uniform estimates");
    traj->add_option("--grid", grid, "angle grid for (s,d) = (1,2)");
    traj->add_option("--frames", frames, "random frames otherwise");
    traj->add_flag("--witnesses", witnesses, "inject the example2 witness lines");
    traj->add_option("--angle-log", angle_log, "emit the first N step angles");

    // random
    auto* rnd = app.add_subcommand("random", "random cocycle estimates");
    std::string spec_path;
    long rn = 100000;
    int reps = 16;
    bool inner = false;
    rnd->add_option("spec", spec_path, "driver spec JSON")->required();
    rnd->add_option("--n", rn, "horizon");
    rnd->add_option("--reps", reps, "replications");
    rnd->add_flag("--inner", inner, "estimate the inner value (max over subspaces)");
    rnd->add_option("--n-ladder", ladder, "horizons for --inner")->delimiter(',');
    rnd->add_option("--grid", grid, "angle grid for --inner");

    // random-matrix
    auto* rmat = app.add_subcommand("random-matrix", "sorted block values + histogram");
    int dim = 100, bins = 32;
    rmat->add_option("--dim", dim, "matrix dimension");
    rmat->add_option("--bins", bins, "histogram bins over [0, pi/2]");
    rmat->add_option("--qmax", aopts.theta.q_max, "resonance search depth");

    CLI11_PARSE(app, argc, argv);

    try {
        Output out{out_path};
        std::uint64_t eff_seed = seed_or_env(seed, seed_given);
        if (pang->parsed()) return cmd_pangles(pfile, qfile, format, out);
        if (tauto->parsed()) {
            aopts.fallback_trajectory = !no_fallback;
            aopts.seed = eff_seed;
            return cmd_theta_auto(afile, aopts, format, out);
        }
        if (scan->parsed()) {
            if (rho_hi <= 0.0) {
                rho_hi = rho_lo;
                rho_steps = 1;
            }
            topts.evaluate_other_branch = scan_alt;
            return cmd_scan(rho_lo, rho_hi, rho_steps, phi_lo, phi_hi, phi_steps, topts,
                            jobs, format, out);
        }
        if (traj->parsed()) {
            MatrixSequence seq =
                make_sequence(kind, tphi, tphi0, tphi1, ha, hb, seq_file, periodic);
            EstimatorConfig cfg;
            cfg.s = s_dim;
            cfg.n_ladder = ladder;
            cfg.k_window = k_window;
            cfg.search.angle_grid = grid;
            cfg.search.random_frames = frames;
            cfg.seed = eff_seed;
            cfg.jobs = jobs;
            return cmd_trajectory(seq, cfg, witnesses, angle_log, format, out);
        }
        if (rnd->parsed()) {
            CocycleDriver driver = driver_from_json(spec_path, eff_seed);
            EstimatorConfig cfg;
            cfg.s = 1;
            cfg.n_ladder = ladder;
            cfg.k_window = 0;
            cfg.search.angle_grid = grid;
            cfg.seed = eff_seed;
            return cmd_random(driver, cfg, rn, reps, inner, format, out);
        }
        if (rmat->parsed()) {
            return cmd_random_matrix(dim, eff_seed, bins, aopts, format, out);
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ParamRange& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const EigencondViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const Error& e) {  // numeric failures
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
