#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mlsos/io.hpp"
#include "mlsos/randgen.hpp"

namespace {

using namespace mlsos;

int exit_code_for(hierarchy::RunStatus s) {
    return s == hierarchy::RunStatus::ConvergedCertified ? 0 : 2;
}

hierarchy::RunOptions make_hopts(int order, int max_order, double tol, const std::string& sigma0) {
    hierarchy::RunOptions h;
    if (order > 0) h.t_min = order;
    if (max_order > 0) h.t_max = max_order;
    h.tol = tol;
    if (sigma0 == "2t-2")
        h.sigma0 = hierarchy::Sigma0Mode::Deg2tMinus2;
    else if (sigma0 != "2t")
        throw InputError("--sigma0: expected '2t' or '2t-2'");
    return h;
}

int cmd_solve(const std::string& path, int order, int max_order, double tol,
              const std::string& sigma0, const std::string& format) {
    const std::string text = io::read_file(path);
    mlp::MultilinearProgram p = io::parse_problem(text);
    p.prepare();
    const auto t0 = std::chrono::steady_clock::now();
    hierarchy::HierarchyReport rep = hierarchy::run(p, make_hopts(order, max_order, tol, sigma0));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (format == "json")
        std::cout << io::report_to_json(p, rep, io::fnv1a_digest(text), wall).dump(2) << "\n";
    else
        std::cout << io::report_to_text(p, rep);
    return exit_code_for(rep.status);
}

int cmd_oracle(const std::string& path) {
    const std::string text = io::read_file(path);
    mlp::MultilinearProgram p = io::parse_problem(text);
    p.prepare();
    mlp::OracleResult r;
    try {
        r = mlp::vertex_oracle(p);
    } catch (const CapExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    std::cout.precision(17);
    std::cout << "value: " << p.to_original_sense(r.value) << "\n";
    std::cout << "tuples scanned: " << r.tuples_scanned << "\n";
    std::cout << "optimal tuples (" << r.optimal_tuples.size() << "):\n";
    for (const auto& tup : r.optimal_tuples) {
        std::cout << " ";
        for (size_t i = 0; i < tup.size(); ++i) {
            const auto& v = p.vertex_data(static_cast<int>(i)).vertices[tup[i]];
            std::cout << " (";
            for (int k = 0; k < v.size(); ++k) std::cout << (k ? "," : "") << v(k);
            std::cout << ")";
        }
        std::cout << "\n";
    }
    std::cout << "finitely_many_optima: " << (mlp::optima_are_finite(r, p) ? "true" : "false") << "\n";
    return 0;
}

int cmd_game(const std::string& path, int order, int max_order, double tol,
             const std::string& sigma0) {
    const std::string text = io::read_file(path);
    apps::BimatrixGame g = io::parse_game(text);
    apps::GameOptions opts;
    opts.hierarchy = make_hopts(order, max_order, tol, sigma0);
    apps::GameSolveResult r;
    try {
        r = apps::solve_game(g, opts);
    } catch (const NoNontrivialOptimizer& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    std::cout.precision(12);
    std::cout << "shift: " << g.shift << "\n";
    std::cout << "nondegenerate: " << (r.nondegenerate ? "true" : "false") << "\n";
    if (r.degenerate_warning) std::cout << "warning: " << *r.degenerate_warning << "\n";
    auto print_vec = [](const char* name, const linalg::Vector& v) {
        std::cout << name << ": (";
        for (int i = 0; i < v.size(); ++i) std::cout << (i ? ", " : "") << v(i);
        std::cout << ")\n";
    };
    print_vec("x_hat", r.equilibrium.x_hat);
    print_vec("y_hat", r.equilibrium.y_hat);
    std::cout << "payoffs: (" << r.equilibrium.payoff1 << ", " << r.equilibrium.payoff2 << ")\n";
    std::cout << "hierarchy status: " << hierarchy::to_string(r.report.status) << ", value "
              << r.report.best_upper << ", gap " << r.report.gap << "\n";
    return 0;
}

int cmd_contain(const std::string& path, double tol, int order, int max_order,
                const std::string& sigma0) {
    const std::string text = io::read_file(path);
    apps::ContainmentInstance c = io::parse_containment(text);
    apps::ContainmentOptions opts;
    opts.tol = tol;
    opts.hierarchy = make_hopts(order, max_order, 1e-5, sigma0);
    apps::ContainmentVerdict v;
    try {
        v = apps::decide_containment(c, opts);
    } catch (const KernelConditionFailed& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 7;
    }
    std::cout.precision(12);
    std::cout << "decision: " << apps::to_string(v.decision) << "\n";
    std::cout << "certified_lower_bound: " << v.certified_lower << "\n";
    std::cout << "tight: " << (v.tight ? "true" : "false") << "\n";
    if (v.witness) {
        std::cout << "witness value: " << v.witness_value << "\n";
        std::cout << "witness x: (";
        for (int i = 0; i < v.witness->first.size(); ++i)
            std::cout << (i ? ", " : "") << v.witness->first(i);
        std::cout << ")\nwitness z: (";
        for (int i = 0; i < v.witness->second.size(); ++i)
            std::cout << (i ? ", " : "") << v.witness->second(i);
        std::cout << ")\n";
    }
    switch (v.decision) {
        case apps::ContainmentDecision::Contained: return 0;
        case apps::ContainmentDecision::NotContained: return 5;
        case apps::ContainmentDecision::Inconclusive: return 6;
    }
    return 6;
}

int cmd_bench(std::uint64_t seed, int count, const std::string& dims_str, int max_order) {
    std::vector<int> dims;
    {
        std::string cur;
        for (char ch : dims_str + ",") {
            if (ch == ',') {
                if (!cur.empty()) dims.push_back(std::stoi(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
    }
    if (dims.size() < 2) throw InputError("--dims: need at least two comma-separated block dims");

    randgen::Rng rng(seed);
    std::cout << "instance  f_star           orders(f_t)                 converged_t  gap\n";
    for (int i = 0; i < count; ++i) {
        mlp::MultilinearProgram p = randgen::random_program(rng, dims, 3);
        p.prepare();
        mlp::OracleResult orc = mlp::vertex_oracle(p);
        hierarchy::RunOptions h;
        if (max_order > 0) h.t_max = max_order;
        hierarchy::HierarchyReport rep = hierarchy::run(p, h);
        std::cout.precision(9);
        std::cout << i << "  " << orc.value << "  [";
        bool first = true;
        int conv_t = -1;
        for (const auto& r : rep.orders) {
            std::cout << (first ? "" : ", ") << "t" << r.t << "=";
            if (std::isfinite(r.f_t))
                std::cout << r.f_t;
            else
                std::cout << "inf";
            first = false;
        }
        if (rep.status == hierarchy::RunStatus::ConvergedCertified && !rep.orders.empty())
            conv_t = rep.orders.back().t;
        std::cout << "]  " << (conv_t >= 0 ? std::to_string(conv_t) : std::string("-")) << "  "
                  << rep.gap << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multilinear programs over polytope products: SOS/SDP hierarchy, vertex oracle, "
                 "bimatrix games, projective containment"};
    app.require_subcommand(1);

    std::string path, format = "text", sigma0 = "2t", dims = "2,2";
    int order = 0, max_order = 0, count = 5;
    double tol = 1e-5, ctol = 1e-6;
    std::uint64_t seed = 1;

    CLI::App* solve = app.add_subcommand("solve", "run the SOS hierarchy on a problem file");
    solve->add_option("file", path)->required();
    solve->add_option("--order", order, "first relaxation order (default: block count)");
    solve->add_option("--max-order", max_order, "last relaxation order (default: block count + 3)");
    solve->add_option("--tol", tol, "sandwich gap tolerance");
    solve->add_option("--sigma0", sigma0, "sigma0 degree budget: 2t (default) or 2t-2");
    solve->add_option("--format", format, "output format: text or json");

    CLI::App* oracle = app.add_subcommand("oracle", "exact optimum over vertex tuples");
    oracle->add_option("file", path)->required();

    CLI::App* game = app.add_subcommand("game", "Nash equilibrium of a bimatrix game {A, B}");
    game->add_option("file", path)->required();
    game->add_option("--order", order);
    game->add_option("--max-order", max_order);
    game->add_option("--tol", tol);
    game->add_option("--sigma0", sigma0);

    CLI::App* contain = app.add_subcommand("contain", "projective polyhedral containment");
    contain->add_option("file", path)->required();
    contain->add_option("--tol", ctol, "containment decision tolerance");
    contain->add_option("--order", order);
    contain->add_option("--max-order", max_order);
    contain->add_option("--sigma0", sigma0);

    CLI::App* bench = app.add_subcommand("bench", "seeded random bilinear instances: oracle vs hierarchy");
    bench->add_option("--seed", seed);
    bench->add_option("--count", count);
    bench->add_option("--dims", dims, "comma-separated block dimensions");
    bench->add_option("--orders", max_order, "cap on the relaxation order");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(path, order, max_order, tol, sigma0, format);
        if (oracle->parsed()) return cmd_oracle(path);
        if (game->parsed()) return cmd_game(path, order, max_order, tol, sigma0);
        if (contain->parsed()) return cmd_contain(path, ctol, order, max_order, sigma0);
        if (bench->parsed()) return cmd_bench(seed, count, dims, max_order);
    } catch (const mlsos::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const mlsos::SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
