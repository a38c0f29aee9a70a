#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "amspec/admat.hpp"
#include "amspec/csupp.hpp"
#include "amspec/fft.hpp"
#include "amspec/io.hpp"
#include "amspec/multiplier.hpp"
#include "amspec/transform.hpp"
#include "cli.hpp"

namespace amspec::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";
constexpr double kProbeResolution = 0.05;

struct Context {
    RunConfig cfg;
    std::string out_dir = ".";
    std::vector<std::string> outputs;

    std::string path(const std::string& name) {
        fs::create_directories(out_dir);
        const std::string p = (fs::path(out_dir) / name).string();
        outputs.push_back(p);
        return p;
    }
};

json config_json(const RunConfig& c) {
    return {{"dim", c.dim},     {"alpha", c.alpha},   {"s", c.s},         {"p", c.p},
            {"q", c.q},         {"kmax", c.kmax},     {"grid_n", c.grid_n}, {"grid_T", c.grid_T},
            {"c1", c.c1},       {"delta", c.delta},   {"seed", c.seed}};
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path);
    out << j.dump(2) << '\n';
}

void write_manifest(Context& ctx, const std::string& command, const json& fitted) {
    json m;
    m["schema"] = "amspec/1";
    m["command"] = command;
    m["config"] = config_json(ctx.cfg);
    m["config_hash"] = config_hash(ctx.cfg);
    m["versions"] = {{"amspec", kVersion}, {"fftw", fft::library_version()}};
    m["fitted"] = fitted;
    const std::string p = ctx.path(command + ".manifest.json");
    m["outputs"] = ctx.outputs;
    write_json(p, m);
}

AlphaGeometry geometry_of(const RunConfig& c) {
    const double c1 = c.c1 > 0.0 ? c.c1 : select_c1(c.alpha, c.dim, std::max(c.kmax, 1), kProbeResolution);
    return AlphaGeometry::make(c.alpha, c.dim, c1);
}

std::unique_ptr<FrameSystem> frame_of(const RunConfig& c) {
    return std::make_unique<FrameSystem>(geometry_of(c), c.kmax, c.grid());
}

SpaceParams space_of(const RunConfig& c) { return SpaceParams(c.s, c.alpha, c.pvec()); }

double rel_err(const SampledSignal& a, const SampledSignal& b) {
    const double nb = b.l2();
    return nb > 0.0 ? (a - b).l2() / nb : (a - b).l2();
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

// --- subcommands -------------------------------------------------------------------------------------------

void cmd_cover(Context& ctx) {
    const RunConfig& c = ctx.cfg;
    const AlphaGeometry g = geometry_of(c);
    const CoverReport rep = certify_covering(g, Truncation{c.kmax, c.grid_T, 1}, kProbeResolution);
    const json j = json::parse(rep.to_json());
    write_json(ctx.path("cover.json"), j);
    write_manifest(ctx, "cover", {{"c1", g.c1}, {"a", g.a}, {"n0", rep.n0}});
    emit(j);
}

void cmd_analyze(Context& ctx, const std::string& in, const std::string& out) {
    const auto fsys = frame_of(ctx.cfg);
    const SampledSignal f = read_signal(in, ctx.cfg.grid());
    const CoeffField c = fsys->analyze(f);
    write_coeffs_csv(ctx.path(out), c);
    const double rt = rel_err(fsys->synthesize(c), f);
    const json j = {{"atoms", c.values.size()}, {"coeff_l2", c.l2()}, {"signal_l2", f.l2()}, {"roundtrip_rel_err", rt}};
    write_manifest(ctx, "analyze", j);
    emit(j);
}

void cmd_synthesize(Context& ctx, const std::string& in, const std::string& out, const std::string& compare) {
    const auto fsys = frame_of(ctx.cfg);
    const CoeffField c = read_coeffs_csv(in, fsys->layout());
    const SampledSignal f = fsys->synthesize(c);
    write_signal(ctx.path(out), f);
    json j = {{"signal_l2", f.l2()}, {"coeff_l2", c.l2()}};
    if (!compare.empty()) j["rel_err_vs_reference"] = rel_err(f, read_signal(compare, ctx.cfg.grid()));
    write_manifest(ctx, "synthesize", j);
    emit(j);
}

void cmd_norm(Context& ctx, const std::string& in) {
    const auto fsys = frame_of(ctx.cfg);
    const SpaceParams sp = space_of(ctx.cfg);
    const SampledSignal f = read_signal(in, ctx.cfg.grid());
    const double mn = mod_norm(f, sp, fsys->bapu());
    const double sn = seq_norm(fsys->analyze(f), sp, f.grid);
    const json j = {{"mod_norm", mn}, {"seq_norm", sn}, {"ratio", mn > 0.0 ? sn / mn : 0.0}, {"l2", f.l2()}};
    write_json(ctx.path("norm.json"), j);
    write_manifest(ctx, "norm", j);
    emit(j);
}

void cmd_admat(Context& ctx, const std::string& matrix_out) {
    const RunConfig& c = ctx.cfg;
    const AdParams par = AdParams::make(c.s, c.alpha, c.pvec(), c.delta);
    const AlphaGeometry g = geometry_of(c);
    auto measure = [&](int kmax) {
        FrameSystem fsys(g, kmax, c.grid());
        GramOptions opt;
        opt.par = &par;
        GramResult gr = gram(fsys, opt);
        const AdMembership m = is_almost_diagonal(gr.G, par);
        const GramDecay d = gram_decay_check(gr.G, 1.0, 1.0, 1.0);
        return std::make_tuple(std::move(gr), m, d);
    };
    const int small = std::max(1, c.kmax / 2);
    const auto [gs, ms, ds] = measure(small);
    const auto [gl, ml, dl] = measure(c.kmax);
    const StabilityReport st = stability(ms.C, ml.C, 0.25);
    const StabilityReport sd = stability(ds.C, dl.C, 0.30);
    if (!matrix_out.empty()) write_opmatrix_csv(ctx.path(matrix_out), gl.G);
    const json j = {{"fitted_C", ml.C},
                    {"truncations", {small, c.kmax}},
                    {"stable", st.stable},
                    {"membership", json::parse(st.to_json())},
                    {"decay_MNL_111", json::parse(sd.to_json())},
                    {"nnz", gl.G.nnz()},
                    {"dropped", gl.dropped},
                    {"dropped_max_ratio", gl.dropped_max_ratio},
                    {"R0", par.R0},
                    {"R1", par.R1},
                    {"beta", par.beta}};
    write_json(ctx.path("admat.json"), j);
    write_manifest(ctx, "admat", j);
    emit(j);
}

Symbol symbol_of(const std::vector<std::string>& spec, double order) {
    require(!spec.empty(), "--symbol needs a value");
    if (spec[0] == "one") return symbol_one();
    if (spec[0] == "bracket-power") {
        if (spec.size() != 2) throw ParseError("--symbol bracket-power needs the exponent b");
        try {
            return symbol_bracket_power(std::stod(spec[1]));
        } catch (const std::invalid_argument&) {
            throw ParseError("--symbol bracket-power: not a number '" + spec[1] + "'");
        }
    }
    if (spec[0] == "sin-square") return symbol_sin_square();
    if (spec[0] == "file") {
        if (spec.size() != 2) throw ParseError("--symbol file needs a path");
        return symbol_from_csv(spec[1], order);
    }
    if (spec.size() == 1) return symbol_from_csv(spec[0], order);
    throw ParseError("unknown symbol '" + spec[0] + "'");
}

void cmd_multiply(Context& ctx, const std::vector<std::string>& symspec, double order, const std::string& route,
                  const std::string& in, const std::string& out) {
    const Symbol m = symbol_of(symspec, order);
    const SampledSignal f = read_signal(in, ctx.cfg.grid());
    json j = {{"symbol", m.name}, {"order", m.order}, {"route", route}};
    SampledSignal g;
    if (route == "direct") {
        g = apply_multiplier(m, f, Route::Direct);
    } else if (route == "matrix") {
        const auto fsys = frame_of(ctx.cfg);
        const OpMatrix M = multiplier_matrix(*fsys, m);
        g = apply_multiplier(m, f, Route::Matrix, fsys.get(), &M);
        j["nnz"] = M.nnz();
    } else {
        throw ParseError("--route must be direct or matrix");
    }
    write_signal(ctx.path(out), g);
    j["output_l2"] = g.l2();
    write_manifest(ctx, "multiply", j);
    emit(j);
}

struct FitFlags {
    int spline_order = 4;
    std::size_t K = 0;
    int m = 16;
    double eps_target = INFINITY;
    std::string weights = "corollary";
};

FitWeights weights_of(const RunConfig& c, const FitFlags& ff) {
    if (ff.weights == "corollary") return corollary_exponents(AdParams::make(c.s, c.alpha, c.pvec(), c.delta));
    if (ff.weights == "flat") return {0.0, 0.0};
    throw ParseError("--weights must be corollary or flat");
}

json fits_json(const FrameSystem& fsys, const PerturbedBuild& pb) {
    json arr = json::array();
    for (std::size_t b = 0; b < pb.fits.size(); ++b) {
        json e = json::parse(pb.fits[b].to_json());
        e["k"] = fsys.layout()->block(b).k;
        arr.push_back(e);
    }
    return arr;
}

PerturbedBuild build_family(const RunConfig& c, const FrameSystem& fsys, const FitFlags& ff) {
    require(c.dim == 1, "compactly supported families are built for n = 1");
    return build_perturbed_family(fsys, bspline_generator(ff.spline_order, 1), ff.K, ff.m, weights_of(c, ff),
                                  1.0 / (2.0 * ff.m));
}

void check_target(const FrameSystem& fsys, const PerturbedBuild& pb, double target) {
    for (std::size_t b = 0; b < pb.fits.size(); ++b)
        if (pb.fits[b].eps > target) {
            std::string k;
            for (int v : fsys.layout()->block(b).k) k += (k.empty() ? "" : ",") + std::to_string(v);
            throw TargetNotReached("fit eps " + std::to_string(pb.fits[b].eps) + " above target " +
                                   std::to_string(target) + " at k = (" + k + ")");
        }
}

void cmd_csupp_fit(Context& ctx, const FitFlags& ff) {
    const auto fsys = frame_of(ctx.cfg);
    const PerturbedBuild pb = build_family(ctx.cfg, *fsys, ff);
    const FitWeights w = weights_of(ctx.cfg, ff);
    const json j = {{"generator_order", ff.spline_order},
                    {"generator_decay_exponent", bspline_generator(ff.spline_order, 1).fitted_decay_exponent()},
                    {"m", ff.m},
                    {"N_env", w.N_env},
                    {"M_env", w.M_env},
                    {"eps", pb.eps},
                    {"eps_target", std::isfinite(ff.eps_target) ? json(ff.eps_target) : json(nullptr)},
                    {"fits", fits_json(*fsys, pb)}};
    write_json(ctx.path("csupp_fit.json"), j);
    write_manifest(ctx, "csupp-fit", {{"eps", pb.eps}, {"N_env", w.N_env}, {"M_env", w.M_env}});
    emit(j);
    check_target(*fsys, pb, ff.eps_target);
}

void cmd_csupp_expand(Context& ctx, const FitFlags& ff, const std::string& in, double tol, int maxit,
                      const std::string& out) {
    const auto fsys = frame_of(ctx.cfg);
    const SampledSignal f = read_signal(in, ctx.cfg.grid());
    const PerturbedBuild pb = build_family(ctx.cfg, *fsys, ff);
    check_target(*fsys, pb, ff.eps_target);
    const ExpansionResult ex = frame_expansion(*pb.family, f, tol, maxit);
    write_coeffs_csv(ctx.path(out), ex.coeffs);
    const json j = {{"eps", pb.eps},
                    {"iterations", ex.iterations},
                    {"max_ratio", ex.max_ratio},
                    {"resynth_rel_err", ex.resynth_err},
                    {"tol", tol}};
    write_json(ctx.path("csupp_expand.json"), j);
    write_manifest(ctx, "csupp-expand", j);
    emit(j);
}

int report(const Error& e) {
    std::cerr << "amspec: " << e.kind() << ": " << e.what() << '\n';
    return e.exit_code();
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"amspec: alpha-modulation space frames, almost diagonal matrices and multipliers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, out_dir = "amspec-out";
    unsigned threads = 0;
    app.add_option("--config", config_path, "key=value run configuration file");
    app.add_option("--out-dir", out_dir, "directory for every file the command writes")->capture_default_str();
    app.add_option("--threads", threads, "worker cap (0: hardware concurrency)");
    const std::vector<std::pair<std::string, std::string>> keys = {
        {"dim", "--dim"},       {"alpha", "--alpha"}, {"s", "--s"},           {"p", "--p"},
        {"q", "--q"},           {"kmax", "--kmax"},   {"grid_n", "--grid-n"}, {"grid_T", "--grid-T"},
        {"c1", "--c1"},         {"delta", "--delta"}, {"seed", "--seed"}};
    std::vector<std::optional<std::string>> overrides(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i)
        app.add_option(keys[i].second, overrides[i], "override config key " + keys[i].first);

    auto* cover = app.add_subcommand("cover", "certify the alpha-covering; exit 2 with the gap point on failure");

    std::string in, compare, matrix_out, route = "direct";
    std::string out_analyze, out_synth, out_mult, out_expand;
    auto* analyze = app.add_subcommand("analyze", "coefficients <f, phi_{k,l}> of a signal");
    analyze->add_option("--in", in, "signal (CSV re,im or AMSIG1)")->required();
    analyze->add_option("--out", out_analyze, "coefficient CSV name")->default_val("coeffs.csv");

    auto* synth = app.add_subcommand("synthesize", "sum c_{k,l} phi_{k,l} from a coefficient CSV");
    synth->add_option("--in", in, "coefficient CSV")->required();
    synth->add_option("--out", out_synth, "signal name; .bin writes AMSIG1")->default_val("signal.csv");
    synth->add_option("--compare", compare, "reference signal for a relative L2 error");

    auto* norm = app.add_subcommand("norm", "modulation norm and coefficient sequence norm of a signal");
    norm->add_option("--in", in, "signal")->required();

    auto* admat = app.add_subcommand("admat", "almost diagonal membership of the frame Gram matrix");
    admat->add_option("--matrix-out", matrix_out, "write the Gram matrix as CSV j,m,k,n,re,im");

    std::vector<std::string> symspec{"one"};
    double order = 0.0;
    auto* mult = app.add_subcommand("multiply", "apply a Fourier multiplier m(D)");
    mult->add_option("--symbol", symspec, "one | bracket-power b | sin-square | file PATH")->expected(1, 2);
    mult->add_option("--order", order, "order b of a symbol read from file");
    mult->add_option("--route", route, "direct | matrix")->capture_default_str();
    mult->add_option("--in", in, "signal")->required();
    mult->add_option("--out", out_mult, "output signal name")->default_val("multiplied.csv");

    FitFlags ff;
    double tol = 1e-7;
    int maxit = 50;
    auto fit_flags = [&](CLI::App* sc) {
        sc->add_option("--spline-order", ff.spline_order, "B-spline order (>= 3)")->capture_default_str();
        sc->add_option("--K", ff.K, "shift count per envelope (0: spacing 1/m over the window)")
            ->capture_default_str();
        sc->add_option("--m", ff.m, "dilation")->capture_default_str();
        sc->add_option("--eps-target", ff.eps_target, "fail with exit 2 when some fit exceeds it");
        sc->add_option("--weights", ff.weights, "corollary | flat")->capture_default_str();
    };
    auto* cfit = app.add_subcommand("csupp-fit", "fit compactly supported envelopes for every k");
    fit_flags(cfit);
    auto* cexp = app.add_subcommand("csupp-expand", "frame expansion in the compactly supported family");
    fit_flags(cexp);
    cexp->add_option("--in", in, "signal")->required();
    cexp->add_option("--tol", tol, "Neumann stopping tolerance")->capture_default_str();
    cexp->add_option("--maxit", maxit, "Neumann iteration cap")->capture_default_str();
    cexp->add_option("--out", out_expand, "coefficient CSV name")->default_val("csupp_coeffs.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        Context ctx;
        ctx.out_dir = out_dir;
        if (!config_path.empty()) ctx.cfg = RunConfig::load(config_path);
        for (std::size_t i = 0; i < keys.size(); ++i)
            if (overrides[i]) ctx.cfg.set(keys[i].first, *overrides[i]);
        ctx.cfg.validate();
        set_max_threads(threads);

        if (cover->parsed()) cmd_cover(ctx);
        else if (analyze->parsed()) cmd_analyze(ctx, in, out_analyze);
        else if (synth->parsed()) cmd_synthesize(ctx, in, out_synth, compare);
        else if (norm->parsed()) cmd_norm(ctx, in);
        else if (admat->parsed()) cmd_admat(ctx, matrix_out);
        else if (mult->parsed()) cmd_multiply(ctx, symspec, order, route, in, out_mult);
        else if (cfit->parsed()) cmd_csupp_fit(ctx, ff);
        else if (cexp->parsed()) cmd_csupp_expand(ctx, ff, in, tol, maxit, out_expand);
        return 0;
    } catch (const Error& e) {
        return report(e);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "amspec: " << e.what() << '\n';
        return 1;
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"amspec"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(int(argv.size()), argv.data());
}

}  // namespace amspec::cli
