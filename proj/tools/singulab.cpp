#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "singulab/germfile.hpp"
#include "singulab/verify.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using namespace singulab;

namespace {

struct CliOptions {
    std::string command;
    std::vector<std::string> paths;
    std::optional<double> epsilon;
    std::optional<double> delta_ratio;
    std::optional<double> eta_ratio;
    std::optional<int> samples;
    std::optional<uint64_t> seed;
    std::optional<int> k;
    std::string out_dir = "reports";
    bool strict = false;
    bool no_timing = false;
};

std::vector<std::string> expand_paths(const std::vector<std::string>& paths) {
    std::vector<std::string> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.path().extension() == ".germ") found.push_back(entry.path().string());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    if (files.empty()) throw Error("no germ files found");
    return files;
}

std::string json_number(double v) {
    if (v == static_cast<long long>(v) && std::fabs(v) < 1e15) {
        std::ostringstream s;
        s << static_cast<long long>(v);
        return s.str();
    }
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

Json report_to_json(const VerificationReport& r) {
    Json j;
    j["theorem"] = r.theorem;
    j["germ"] = r.germ;
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["stderr_lhs"] = r.stderr_lhs;
    j["stderr_rhs"] = r.stderr_rhs;
    j["pass"] = r.pass;
    j["seed"] = r.seed;
    j["epsilon"] = r.epsilon;
    j["delta"] = r.delta;
    j["eta"] = r.eta;
    j["n_samples"] = r.n_samples;
    j["resampled"] = r.resampled;
    j["wall_ms"] = r.wall_ms;
    if (!r.error.empty()) j["error"] = r.error;
    j["notes"] = r.notes;
    return j;
}

std::string tsv_row(const VerificationReport& r) {
    std::ostringstream s;
    s << r.theorem << '\t' << r.germ << '\t' << json_number(r.lhs) << '\t' << json_number(r.rhs)
      << '\t' << json_number(r.stderr_lhs) << '\t' << json_number(r.stderr_rhs) << '\t'
      << (r.pass ? "true" : "false") << '\t' << r.seed << '\t' << json_number(r.epsilon) << '\t'
      << json_number(r.delta) << '\t' << json_number(r.eta) << '\t' << r.n_samples << '\t'
      << r.resampled << '\t' << r.wall_ms;
    return s.str();
}

constexpr const char* kTsvHeader =
    "theorem\tgerm\tlhs\trhs\tstderr_lhs\tstderr_rhs\tpass\tseed\tepsilon\tdelta\teta\t"
    "n_samples\tresampled\twall_ms";

class Runner {
public:
    explicit Runner(const CliOptions& opts) : opts_(opts) {}

    int run() {
        auto files = expand_paths(opts_.paths);
        fs::create_directories(opts_.out_dir);
        std::ofstream tsv(fs::path(opts_.out_dir) / "reports.tsv");
        tsv << kTsvHeader << '\n';
        bool all_pass = true;
        for (const auto& file : files) {
            GermDocument doc = load_germ(file);
            Germ germ = doc.to_germ();
            std::vector<VerificationReport> reports = dispatch(doc, germ);
            for (auto& r : reports) {
                check_assertions(doc, &r);
                if (opts_.no_timing) r.wall_ms = 0;
                write_report(r);
                tsv << tsv_row(r) << '\n';
                std::cout << (r.pass ? "[pass] " : "[FAIL] ") << r.germ << " " << r.theorem
                          << "  lhs=" << r.lhs << " rhs=" << r.rhs;
                if (!r.error.empty()) std::cout << "  error: " << r.error;
                std::cout << "\n";
                if (!r.pass) all_pass = false;
            }
        }
        return all_pass ? 0 : 1;
    }

private:
    CliOptions opts_;

    ScaleSchedule schedule_for(const GermDocument& doc, const Germ& germ) {
        ScaleSchedule s;
        if (opts_.epsilon) s.epsilon = *opts_.epsilon;
        else if (doc.epsilon) s.epsilon = *doc.epsilon;
        else s.epsilon = calibrated(germ);
        s.delta_ratio = opts_.delta_ratio.value_or(doc.delta_ratio);
        s.eta_ratio = opts_.eta_ratio.value_or(doc.eta_ratio);
        return s;
    }

    double calibrated(const Germ& germ) {
        auto it = eps_cache_.find(germ.name);
        if (it != eps_cache_.end()) return it->second;
        double eps = calibrate_epsilon(germ);
        eps_cache_[germ.name] = eps;
        return eps;
    }

    CheckContext context_for(const GermDocument& doc, bool direction_count) {
        CheckContext ctx;
        ctx.n_samples = opts_.samples.value_or(direction_count ? doc.n_directions : doc.n_samples);
        ctx.seed = opts_.seed.value_or(doc.seed);
        ctx.strict_unstable = opts_.strict;
        ctx.g0 = doc.g();
        return ctx;
    }

    VerificationReport skipped(const GermDocument& doc, const std::string& theorem,
                               const std::string& why) {
        VerificationReport r;
        r.theorem = theorem;
        r.germ = doc.name;
        r.pass = true;
        r.notes.push_back("skipped: " + why);
        return r;
    }

    std::vector<VerificationReport> dispatch(const GermDocument& doc, const Germ& germ) {
        const std::string& cmd = opts_.command;
        ScaleSchedule sched = schedule_for(doc, germ);
        std::vector<VerificationReport> out;
        auto run_one = [&](const std::string& c) {
            if (c == "le-greuel") {
                out.push_back(check_le_greuel(germ, doc.f(), sched, context_for(doc, true)));
            } else if (c == "corollary") {
                if (!doc.isolated_f) out.push_back(skipped(doc, "corollary_isolated", "f is not asserted isolated"));
                else out.push_back(check_corollary_isolated(germ, doc.f(), sched, context_for(doc, true)));
            } else if (c == "lemma-link") {
                if (!doc.isolated_f) out.push_back(skipped(doc, "lemma_link", "f is not asserted isolated"));
                else out.push_back(check_lemma_link(germ, doc.f(), sched, context_for(doc, false)));
            } else if (c == "gauss-bonnet") {
                out.push_back(estimate_gauss_bonnet(germ, doc.f(), sched, context_for(doc, false)));
            } else if (c == "sigma") {
                if (opts_.k) out.push_back(sigma_report(germ, doc, sched, *opts_.k));
                else out.push_back(check_sigma_relation(germ, sched, context_for(doc, false)));
            } else if (c == "kinematic") {
                CheckContext ctx = context_for(doc, false);
                ctx.k = opts_.k.value_or(germ.dim());
                out.push_back(check_kinematic(germ, sched, ctx));
            } else if (c == "curv-link") {
                out.push_back(check_curv_and_link(germ, sched, context_for(doc, false)));
            } else if (c == "density") {
                out.push_back(density_report(germ, doc, sched));
            } else {
                throw Error("unknown command: " + c);
            }
        };
        if (cmd == "all") {
            for (const char* c : {"le-greuel", "corollary", "lemma-link", "gauss-bonnet", "sigma",
                                  "kinematic", "curv-link", "density"})
                run_one(c);
        } else {
            run_one(cmd);
        }
        return out;
    }

    VerificationReport sigma_report(const Germ& germ, const GermDocument& doc,
                                    const ScaleSchedule& sched, int k) {
        CheckContext ctx = context_for(doc, false);
        VerificationReport r;
        r.theorem = "sigma";
        r.germ = doc.name;
        r.epsilon = sched.epsilon;
        r.delta = sched.delta();
        r.eta = sched.eta();
        r.seed = ctx.seed;
        r.n_samples = ctx.n_samples;
        auto t0 = std::chrono::steady_clock::now();
        try {
            MCEstimate est = sigma(germ, k, sched, ctx.n_samples, ctx.seed);
            r.lhs = est.mean;
            r.stderr_lhs = est.stderr_;
            r.rhs = est.mean;
            r.pass = true;
            r.notes.push_back("k = " + std::to_string(k));
        } catch (const std::exception& e) {
            r.error = e.what();
            r.pass = false;
        }
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        return r;
    }

    VerificationReport density_report(const Germ& germ, const GermDocument& doc,
                                      const ScaleSchedule& sched) {
        VerificationReport r;
        r.theorem = "density";
        r.germ = doc.name;
        r.epsilon = sched.epsilon;
        r.delta = sched.delta();
        r.eta = sched.eta();
        r.seed = opts_.seed.value_or(doc.seed);
        r.n_samples = 0;
        auto t0 = std::chrono::steady_clock::now();
        try {
            MCEstimate est = density(germ, sched);
            r.lhs = est.mean;
            r.stderr_lhs = est.stderr_;
            r.rhs = est.mean;
            r.pass = true;
        } catch (const std::exception& e) {
            r.error = e.what();
            r.pass = false;
        }
        r.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        return r;
    }

    void check_assertions(const GermDocument& doc, VerificationReport* r) {
        for (const auto& a : doc.assertions) {
            auto dot = a.key.find('.');
            std::string theorem = a.key.substr(0, dot);
            std::string field = a.key.substr(dot + 1);
            bool applies = false;
            double got = 0.0;
            if (theorem == r->theorem && (field == "lhs" || field == "rhs")) {
                applies = true;
                got = field == "lhs" ? r->lhs : r->rhs;
            } else if (theorem == "density" && r->theorem == "density" && field == "value") {
                applies = true;
                got = r->lhs;
            }
            if (!applies) continue;
            double tol = r->exact_rule ? 1e-9
                                       : std::max(3.0 * (r->stderr_lhs + r->stderr_rhs),
                                                  0.05 * std::max(1.0, std::fabs(a.value)));
            if (std::fabs(got - a.value) > tol) {
                r->pass = false;
                r->notes.push_back("assertion " + a.key + " expected " + std::to_string(a.value) +
                                   ", got " + std::to_string(got) + (a.note.empty() ? "" : " (" + a.note + ")"));
            }
        }
    }

    void write_report(const VerificationReport& r) {
        fs::path path = fs::path(opts_.out_dir) / (r.germ + "-" + r.theorem + ".report.json");
        std::ofstream out(path);
        out << report_to_json(r).dump(2) << "\n";
    }

    std::map<std::string, double> eps_cache_;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singulab: numeric verification of stratified Milnor-fibre identities"};
    app.require_subcommand(0);

    CliOptions opts;
    app.add_option("command", opts.command,
                   "le-greuel | corollary | lemma-link | gauss-bonnet | sigma | kinematic | "
                   "curv-link | density | all")
        ->required();
    app.add_option("paths", opts.paths, "germ files or directories")->required();
    double eps = 0, dr = 0, er = 0;
    int n = 0, k = 0;
    uint64_t seed = 0;
    auto* oe = app.add_option("--epsilon", eps, "ball radius override");
    auto* od = app.add_option("--delta-ratio", dr, "delta / epsilon (signed)");
    auto* oh = app.add_option("--eta-ratio", er, "eta / |delta|");
    auto* on = app.add_option("-N,--samples", n, "Monte-Carlo samples / directions");
    auto* os = app.add_option("--seed", seed, "random seed");
    auto* ok = app.add_option("--k", k, "slice codimension (sigma, kinematic)");
    app.add_option("--out", opts.out_dir, "report directory");
    app.add_flag("--strict", opts.strict, "treat unstable chi as failure");
    app.add_flag("--no-timing", opts.no_timing, "write wall_ms = 0 for byte-stable reports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*oe) opts.epsilon = eps;
    if (*od) opts.delta_ratio = dr;
    if (*oh) opts.eta_ratio = er;
    if (*on) opts.samples = n;
    if (*os) opts.seed = seed;
    if (*ok) opts.k = k;

    const std::vector<std::string> known = {"le-greuel", "corollary", "lemma-link", "gauss-bonnet",
                                            "sigma",     "kinematic", "curv-link",  "density",
                                            "all"};
    if (std::find(known.begin(), known.end(), opts.command) == known.end()) {
        std::cerr << "usage error: unknown command '" << opts.command << "'\n";
        return 2;
    }

    try {
        Runner runner(opts);
        return runner.run();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
