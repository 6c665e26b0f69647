// qts: solve, verify, generate, and pseudo-invert quaternion tensor systems
// stored as JSON bundles. Exit codes: 0 = consistent / verified, 2 =
// inconsistent / residuals above tolerance, 1 = usage, parse, or shape error.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "qts/errors.hpp"
#include "qts/generalized_inverse.hpp"
#include "qts/io.hpp"
#include "qts/rng.hpp"
#include "qts/toolkit.hpp"

namespace {

using namespace qts;

double default_tol() {
    if (const char* env = std::getenv("QTS_TOL")) {
        try {
            return std::stod(env);
        } catch (...) {
            std::cerr << "warning: ignoring invalid QTS_TOL='" << env << "'\n";
        }
    }
    return 1e-8;
}

std::map<std::string, std::vector<std::size_t>> parse_modes(const std::string& text,
                                                            SystemKind kind) {
    std::map<std::string, std::vector<std::size_t>> out;
    if (text.empty()) return out;
    const auto names = space_names(kind);
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw ParseError("--modes entry '" + item + "' is not NAME=ext[xext...]");
        }
        const std::string name = item.substr(0, eq);
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            std::string known;
            for (const auto& n : names) known += (known.empty() ? "" : ",") + n;
            throw ParseError("unknown space '" + name + "' for this kind (expected one of " +
                             known + ")");
        }
        std::vector<std::size_t> modes;
        std::stringstream ext(item.substr(eq + 1));
        std::string tok;
        while (std::getline(ext, tok, 'x')) {
            std::size_t pos = 0;
            unsigned long v = 0;
            try {
                v = std::stoul(tok, &pos);
            } catch (...) {
                throw ParseError("bad extent '" + tok + "' in --modes");
            }
            if (pos != tok.size() || v == 0) {
                throw ParseError("mode extents must be positive integers, got '" + tok + "'");
            }
            modes.push_back(v);
        }
        if (modes.empty()) throw ParseError("empty mode list for space '" + name + "'");
        out[name] = std::move(modes);
    }
    return out;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    }
};

void emit_report(const std::string& path, io::RunReport& rep, const Timer& timer, bool timing) {
    if (timing) rep.duration_ms = timer.ms();
    io::save_json(path, io::report_to_json(rep));
    std::cout << "report: " << path << " (" << timer.ms() << " ms)\n";
}

int cmd_solve(const std::string& input, double tol, double rank_tol, const std::string& params,
              std::uint64_t seed, const std::string& out_path, const std::string& report_path,
              bool timing, const std::vector<std::string>& argv_echo) {
    Timer timer;
    const Instance inst = io::load_instance(input);
    const SolveOutcome outcome = solve_instance(inst, SolveOptions{tol, rank_tol});

    io::RunReport rep;
    rep.command = "solve";
    rep.argv = argv_echo;
    rep.tol_res = tol;
    rep.tol_rank = rank_tol;
    rep.conditions = outcome.condition_residuals;
    rep.verdict = outcome.consistent ? "consistent" : "inconsistent";

    if (!outcome.consistent) {
        std::cout << "inconsistent (threshold " << outcome.threshold() << ")\n";
        for (const auto& v : outcome.violated()) {
            std::cout << "  violated: " << v.label << " residual " << v.residual << "\n";
        }
        emit_report(report_path, rep, timer, timing);
        return 2;
    }

    std::map<std::string, QTensor> unknowns;
    if (params == "random") {
        Rng rng(seed);
        std::map<std::string, QTensor> assignment;
        const SlotRegistry& reg = *outcome.slots;
        for (const auto& slot : reg.all()) {
            assignment.emplace(slot.name, random_tensor(rng, slot.shape));
        }
        for (const auto& [name, sol] : outcome.solutions) {
            unknowns.emplace(name, instantiate_solution(sol, assignment));
        }
    } else {
        for (const auto& [name, sol] : outcome.solutions) unknowns.emplace(name, sol.particular());
    }

    io::save_json(out_path, io::solution_to_json(inst.kind, unknowns));
    rep.outputs.push_back(out_path);
    rep.equations = verify_solution(inst, unknowns).equations;

    std::cout << "consistent; solution (" << params << " parameters) written to " << out_path
              << "\n";
    for (const auto& e : rep.equations) {
        std::cout << "  " << e.label << " residual " << e.absolute << " (ratio " << e.ratio
                  << ")\n";
    }
    emit_report(report_path, rep, timer, timing);
    return 0;
}

int cmd_verify(const std::string& instance_path, const std::string& solution_path, double tol,
               const std::string& report_path, bool timing,
               const std::vector<std::string>& argv_echo) {
    Timer timer;
    const Instance inst = io::load_instance(instance_path);
    auto [kind, unknowns] = io::solution_from_json(io::load_json(solution_path));
    if (kind != inst.kind) {
        throw ParseError("solution kind '" + to_string(kind) + "' does not match instance kind '" +
                         to_string(inst.kind) + "'");
    }
    const ResidualReport res = verify_solution(inst, unknowns);

    io::RunReport rep;
    rep.command = "verify";
    rep.argv = argv_echo;
    rep.tol_res = tol;
    rep.equations = res.equations;
    const bool ok = res.within(tol);
    rep.verdict = ok ? "pass" : "fail";
    for (const auto& e : res.equations) {
        std::cout << "  " << e.label << " residual " << e.absolute << " (ratio " << e.ratio
                  << ")\n";
    }
    std::cout << (ok ? "verified" : "verification failed") << " at tolerance " << tol << "\n";
    emit_report(report_path, rep, timer, timing);
    return ok ? 0 : 2;
}

int cmd_gen(const std::string& kind_str, const std::string& modes_str, std::uint64_t seed,
            bool inconsistent, double conditioning, const std::string& out_path) {
    InstanceSpec spec;
    spec.kind = system_kind_from_string(kind_str);
    spec.modes = parse_modes(modes_str, spec.kind);
    spec.seed = seed;
    spec.conditioning = conditioning;
    const Instance inst = inconsistent ? gen_inconsistent(spec) : gen_consistent(spec);
    io::save_instance(out_path, inst);
    std::cout << "wrote " << to_string(spec.kind) << " instance (seed " << seed
              << (inconsistent ? ", inconsistent" : ", consistent") << ") to " << out_path << "\n";
    return 0;
}

int cmd_pinv(const std::string& input, double rank_tol, const std::string& out_path,
             const std::string& report_path, bool timing,
             const std::vector<std::string>& argv_echo) {
    Timer timer;
    const QTensor a = io::load_tensor(input);
    const QTensor p = tensor_pinv(a, rank_tol);
    io::save_tensor(out_path, p);

    io::RunReport rep;
    rep.command = "pinv";
    rep.argv = argv_echo;
    rep.tol_rank = rank_tol;
    const auto res = penrose_check(matricize(a), matricize(p));
    rep.penrose.assign(res.begin(), res.end());
    rep.verdict = "pass";
    rep.outputs.push_back(out_path);
    std::cout << "pseudoinverse written to " << out_path << "; penrose residuals";
    for (double r : res) std::cout << " " << r;
    std::cout << "\n";
    emit_report(report_path, rep, timer, timing);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quaternion tensor Sylvester systems: solve / verify / gen / pinv"};
    app.require_subcommand(1);

    std::vector<std::string> argv_echo(argv, argv + argc);
    const double tol0 = default_tol();

    // solve
    auto* solve = app.add_subcommand("solve", "solve an instance bundle");
    std::string solve_input, solve_out = "solution.json", solve_report = "report.json";
    std::string solve_params = "zero";
    double solve_tol = tol0, solve_rank = 1e-12;
    std::uint64_t solve_seed = 0;
    bool solve_timing = false;
    solve->add_option("input", solve_input, "instance bundle (JSON)")->required();
    solve->add_option("--tol", solve_tol, "condition residual tolerance");
    solve->add_option("--rank-tol", solve_rank, "pseudoinverse rank cutoff");
    solve->add_option("--params", solve_params, "slot values: zero|random")
        ->check(CLI::IsMember({"zero", "random"}));
    solve->add_option("--seed", solve_seed, "seed for --params random");
    solve->add_option("--out", solve_out, "solution output path");
    solve->add_option("--report", solve_report, "report output path");
    solve->add_flag("--timing", solve_timing, "include wall-clock duration in the report");

    // verify
    auto* verify = app.add_subcommand("verify", "check a solution against an instance");
    std::string verify_instance, verify_solution_path, verify_report = "report.json";
    double verify_tol = tol0;
    bool verify_timing = false;
    verify->add_option("instance", verify_instance, "instance bundle (JSON)")->required();
    verify->add_option("solution", verify_solution_path, "solution file (JSON)")->required();
    verify->add_option("--tol", verify_tol, "residual ratio tolerance");
    verify->add_option("--report", verify_report, "report output path");
    verify->add_flag("--timing", verify_timing, "include wall-clock duration in the report");

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance bundle");
    gen->alias("generate");
    std::string gen_kind = "axb", gen_modes, gen_out = "instance.json";
    std::uint64_t gen_seed = 0;
    bool gen_inconsistent_flag = false;
    double gen_conditioning = 1.0;
    gen->add_option("--kind", gen_kind, "axb|two_term|mixed|triple|chain")->required();
    gen->add_option("--modes", gen_modes, "mode lists, e.g. I=2x2,J=3 (default 2 per space)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_flag("--inconsistent", gen_inconsistent_flag, "make the instance unsolvable");
    gen->add_option("--conditioning", gen_conditioning,
                    "singular value spread of the coefficients (>= 1)")
        ->check(CLI::Range(1.0, 1e16));
    gen->add_option("--out", gen_out, "instance output path");

    // pinv
    auto* pinv = app.add_subcommand("pinv", "Moore-Penrose inverse of a tensor file");
    std::string pinv_input, pinv_out = "pinv.json", pinv_report = "report.json";
    double pinv_rank = 1e-12;
    bool pinv_timing = false;
    pinv->add_option("input", pinv_input, "tensor file (JSON)")->required();
    pinv->add_option("--tol", pinv_rank, "rank cutoff tolerance");
    pinv->add_option("--out", pinv_out, "pseudoinverse output path");
    pinv->add_option("--report", pinv_report, "report output path");
    pinv->add_flag("--timing", pinv_timing, "include wall-clock duration in the report");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            return cmd_solve(solve_input, solve_tol, solve_rank, solve_params, solve_seed,
                             solve_out, solve_report, solve_timing, argv_echo);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_instance, verify_solution_path, verify_tol, verify_report,
                              verify_timing, argv_echo);
        }
        if (gen->parsed()) {
            return cmd_gen(gen_kind, gen_modes, gen_seed, gen_inconsistent_flag, gen_conditioning,
                           gen_out);
        }
        if (pinv->parsed()) {
            return cmd_pinv(pinv_input, pinv_rank, pinv_out, pinv_report, pinv_timing, argv_echo);
        }
    } catch (const qts::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
