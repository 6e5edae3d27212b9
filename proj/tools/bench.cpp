// Benchmark driver: runs the shipped test problems from flat key=value
// config files, and produces convergence and CPU-efficiency tables.
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "alefv/cases.hpp"
#include "alefv/config.hpp"
#include "alefv/io.hpp"

using namespace alefv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

std::vector<std::string> splitList(const std::string& s) {
    std::vector<std::string> out;
    std::size_t b = 0;
    while (b <= s.size()) {
        std::size_t e = s.find(',', b);
        if (e == std::string::npos) e = s.size();
        if (e > b) out.push_back(s.substr(b, e - b));
        b = e + 1;
    }
    return out;
}

void writeOutputs(const Stepper& st, const CaseSetup& setup,
                  const std::string& outDir, const std::string& label) {
    std::filesystem::create_directories(outDir);
    writeSnapshot(st.mesh(), st.physics(), st.averages(),
                  fmt::format("{}/{}_{}.vtk", outDir, setup.name, label));
    if (setup.radialProfile)
        writeRadialProfile(st.mesh(), st.averages(),
                           fmt::format("{}/{}_{}_radial.csv", outDir, setup.name,
                                       label));
}

int cmdRun(const std::string& configPath,
           const std::vector<std::string>& overrides) {
    auto kv = parseConfigFile(configPath);
    applyOverrides(kv, overrides);
    RunConfig cfg = toRunConfig(kv);
    CaseSetup setup = buildCase(cfg);
    Stepper st = makeStepper(setup);
    fmt::print("case={} order={} elements={} tfinal={:.6g} cfl={:.3g}\n",
               setup.name, cfg.order, st.mesh().numElements(), setup.tFinal,
               setup.params.cfl);
    writeOutputs(st, setup, cfg.outDir, "initial");
    int every = cfg.snapshotEvery;
    RunResult res = runCase(st, setup, cfg.maxSteps,
                            [&](const Stepper& s, int n) {
                                if (every > 0 && n % every == 0)
                                    writeOutputs(s, setup, cfg.outDir,
                                                 fmt::format("step{:06d}", n));
                            });
    writeOutputs(st, setup, cfg.outDir, "final");
    fmt::print("steps={} t={:.8g} wall={:.2f}s\n", res.steps, res.tEnd,
               res.wallSeconds);
    State tot = res.totalConserved;
    fmt::print("totals:");
    for (int k = 0; k < tot.size(); ++k) fmt::print(" {:.12e}", tot(k));
    fmt::print("\n");
    if (res.hasErrors)
        fmt::print("h={:.4e} L1={:.6e} L2={:.6e}\n", meshSize(st.mesh()),
                   res.errors.l1, res.errors.l2);
    return 0;
}

int cmdConverge(const std::string& caseName, const std::string& ordersCsv,
                const std::string& meshesCsv, const std::string& flux,
                double cfl, const std::string& outDir) {
    std::filesystem::create_directories(outDir);
    std::vector<std::vector<double>> table;
    fmt::print("{:>6} {:>6} {:>12} {:>12} {:>8}\n", "order", "mesh", "h", "L2",
               "O(L2)");
    for (const std::string& os : splitList(ordersCsv)) {
        double prevH = 0.0, prevE = 0.0;
        for (const std::string& ms : splitList(meshesCsv)) {
            RunConfig cfg;
            cfg.caseName = caseName;
            cfg.order = std::stoi(os);
            cfg.meshRes = std::stoi(ms);
            cfg.fluxMode = flux;
            cfg.cfl = cfl;
            CaseSetup setup = buildCase(cfg);
            if (!setup.reference)
                throw SolverError(SolverError::Kind::Config,
                                  fmt::format("case '{}' has no reference solution",
                                              caseName));
            Stepper st = makeStepper(setup);
            RunResult res = runCase(st, setup);
            double h = meshSize(st.mesh());
            double order = prevE > 0.0
                               ? std::log(prevE / res.errors.l2) / std::log(prevH / h)
                               : std::nan("");
            if (std::isnan(order))
                fmt::print("{:>6} {:>6} {:>12.4e} {:>12.4e} {:>8}\n", cfg.order,
                           cfg.meshRes, h, res.errors.l2, "-");
            else
                fmt::print("{:>6} {:>6} {:>12.4e} {:>12.4e} {:>8.2f}\n", cfg.order,
                           cfg.meshRes, h, res.errors.l2, order);
            table.push_back({static_cast<double>(cfg.order),
                             static_cast<double>(cfg.meshRes), h, res.errors.l1,
                             res.errors.l2, order, res.wallSeconds});
            prevH = h;
            prevE = res.errors.l2;
        }
    }
    writeCsv(fmt::format("{}/{}_convergence.csv", outDir, caseName),
             "order,mesh,h,l1,l2,observed_order,wall_seconds", table);
    return 0;
}

int cmdCompare(const std::string& caseName, const std::string& modesCsv,
               const std::string& cflsCsv, int order, int meshRes,
               const std::string& outDir) {
    std::filesystem::create_directories(outDir);
    std::vector<std::vector<double>> table;
    fmt::print("{:>14} {:>6} {:>12} {:>10} {:>8}\n", "mode", "cfl", "L1", "wall_s",
               "status");
    int modeIdx = 0;
    for (const std::string& mode : splitList(modesCsv)) {
        for (const std::string& cs : splitList(cflsCsv)) {
            RunConfig cfg;
            cfg.caseName = caseName;
            cfg.order = order;
            cfg.meshRes = meshRes;
            cfg.fluxMode = mode;
            cfg.cfl = std::stod(cs);
            CaseSetup setup = buildCase(cfg);
            setup.params.maxDtRetries = 0;  // expose stability limits honestly
            double l1 = std::nan(""), wall = std::nan("");
            int ok = 0;
            try {
                Stepper st = makeStepper(setup);
                RunResult res = runCase(st, setup);
                l1 = res.errors.l1;
                wall = res.wallSeconds;
                ok = 1;
                fmt::print("{:>14} {:>6} {:>12.4e} {:>10.2f} {:>8}\n", mode,
                           cs, l1, wall, "ok");
            } catch (const SolverError& e) {
                fmt::print("{:>14} {:>6} {:>12} {:>10} {:>8} ({})\n", mode, cs,
                           "-", "-", "FAILED", e.what());
            }
            table.push_back({static_cast<double>(modeIdx), std::stod(cs), l1,
                             wall, static_cast<double>(ok)});
        }
        ++modeIdx;
    }
    writeCsv(fmt::format("{}/{}_efficiency.csv", outDir, caseName),
             "mode_index,cfl,l1,wall_seconds,completed", table);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ALE finite volume benchmark driver"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run one case from a config file");
    std::string configPath;
    std::vector<std::string> overrides;
    run->add_option("--config", configPath, "key=value config file")->required();
    run->add_option("--override", overrides, "key=value overrides");

    auto* conv = app.add_subcommand("converge", "mesh-refinement study");
    std::string caseName, ordersCsv = "2,3,4", meshesCsv, flux = "", outDir = ".";
    double cfl = -1.0;
    conv->add_option("--case", caseName, "case name")->required();
    conv->add_option("--orders", ordersCsv, "comma list of scheme orders");
    conv->add_option("--meshes", meshesCsv, "comma list of mesh resolutions")
        ->required();
    conv->add_option("--flux", flux, "flux mode");
    conv->add_option("--cfl", cfl, "Courant number");
    conv->add_option("--outdir", outDir, "output directory");

    auto* cmp = app.add_subcommand("compare", "CPU-time vs error comparison");
    std::string modesCsv = "1d-hll,multid-hll", cflsCsv = "0.5,0.95";
    int order = 3, meshRes = -1;
    cmp->add_option("--case", caseName, "case name")->required();
    cmp->add_option("--modes", modesCsv, "comma list of flux modes");
    cmp->add_option("--cfl", cflsCsv, "comma list of Courant numbers");
    cmp->add_option("--order", order, "scheme order");
    cmp->add_option("--mesh", meshRes, "mesh resolution");
    cmp->add_option("--outdir", outDir, "output directory");

    try {
        app.parse(argc, argv);
        if (run->parsed()) return cmdRun(configPath, overrides);
        if (conv->parsed())
            return cmdConverge(caseName, ordersCsv, meshesCsv, flux, cfl, outDir);
        return cmdCompare(caseName, modesCsv, cflsCsv, order, meshRes, outDir);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const SolverError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return e.kind() == SolverError::Kind::Config ? kExitConfig : kExitSolver;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kExitSolver;
    }
}
