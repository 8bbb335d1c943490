// Command line front end; links only the shared C API.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flatsurf/capi.h"

namespace {

int fail(fs_status st) {
    std::cerr << "error: " << fs_status_name(st) << ": " << fs_last_error() << "\n";
    return 1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

int emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return 0;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write '" << out_path << "'\n";
        return 1;
    }
    out << text;
    return 0;
}

struct SurfaceHandle {
    fs_surface* ptr = nullptr;
    SurfaceHandle() = default;
    explicit SurfaceHandle(fs_surface* p) : ptr(p) {}
    SurfaceHandle(const SurfaceHandle&) = delete;
    ~SurfaceHandle() { fs_surface_free(ptr); }
};

struct OwnedString {
    char* ptr = nullptr;
    OwnedString(const OwnedString&) = delete;
    OwnedString() = default;
    ~OwnedString() { fs_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

int load_surface(const std::string& path, SurfaceHandle& h) {
    std::string text = slurp(path);
    fs_status st = fs_surface_parse(text.c_str(), &h.ptr);
    if (st != FS_OK) return fail(st);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"flat surface toolkit"};
    app.require_subcommand(1);

    std::string file, out_path, gen_name, poly, transversal_spec;
    std::vector<double> gen_params;
    double t = 0, tmax = 8, dt = 0.1, eta = 0.1, eps0 = 0.1, res = 0;
    double x = 0, y = 0, len = 1000;
    int depth = 2, grid = 8, starts = 5, samples = 50;
    std::uint64_t seed = 0;
    bool normalize = false;
    bool marked_singular = true;

    auto* validate_cmd = app.add_subcommand("validate", "check a surface file");
    validate_cmd->add_option("file", file)->required();

    auto* info_cmd = app.add_subcommand("info", "surface summary with the Gauss-Bonnet check");
    info_cmd->add_option("file", file)->required();

    auto* gen_cmd = app.add_subcommand("gen", "emit a named surface");
    gen_cmd->add_option("name", gen_name, "torus|pillowcase|lshape|regular-2ngon|torus-cover")
        ->required();
    gen_cmd->add_option("params", gen_params, "numeric parameters");
    gen_cmd->add_option("--out", out_path);

    auto* cover_cmd = app.add_subcommand("cover", "orientation double cover");
    cover_cmd->add_option("file", file)->required();
    cover_cmd->add_option("--out", out_path);

    auto* flow_cmd = app.add_subcommand("flow", "apply the Teichmueller flow g_t");
    flow_cmd->add_option("file", file)->required();
    flow_cmd->add_option("--t", t)->required();
    flow_cmd->add_flag("--normalize", normalize);
    flow_cmd->add_option("--out", out_path);

    auto* sys_cmd = app.add_subcommand("systole", "systole estimate");
    sys_cmd->add_option("file", file)->required();
    sys_cmd->add_option("--depth", depth);
    sys_cmd->add_option("--treat-marked-as-singular", marked_singular);

    auto* crit_cmd = app.add_subcommand("criterion", "unique-ergodicity criterion integral");
    crit_cmd->add_option("file", file)->required();
    crit_cmd->add_option("--tmax", tmax)->required();
    crit_cmd->add_option("--dt", dt)->required();
    crit_cmd->add_option("--depth", depth);
    crit_cmd->add_option("--out", out_path)->required();

    auto* thm3_cmd = app.add_subcommand("thm3", "thick-thin quantities along the flow");
    thm3_cmd->add_option("file", file)->required();
    thm3_cmd->add_option("--eta", eta)->required();
    thm3_cmd->add_option("--eps", eps0)->required();
    thm3_cmd->add_option("--res", res, "graph resolution h (default eps/10)");
    thm3_cmd->add_option("--tmax", tmax)->required();
    thm3_cmd->add_option("--dt", dt);
    thm3_cmd->add_option("--out", out_path)->required();

    auto* trace_cmd = app.add_subcommand("trace", "horizontal leaf trace with box discrepancy");
    trace_cmd->add_option("file", file)->required();
    trace_cmd->add_option("--x", x)->required();
    trace_cmd->add_option("--y", y)->required();
    trace_cmd->add_option("--poly", poly, "start polygon (default: first)");
    trace_cmd->add_option("--len", len)->required();
    trace_cmd->add_option("--grid", grid);
    trace_cmd->add_option("--out", out_path)->required();

    auto* rm_cmd = app.add_subcommand("return-map", "first-return interval exchange");
    rm_cmd->add_option("file", file)->required();
    rm_cmd->add_option("--transversal", transversal_spec, "poly:x,y:height")->required();

    auto* panel_cmd = app.add_subcommand("panel", "Birkhoff averages for seeded starts");
    panel_cmd->add_option("file", file)->required();
    panel_cmd->add_option("--starts", starts)->required();
    panel_cmd->add_option("--seed", seed)->required();
    panel_cmd->add_option("--len", len)->required();
    panel_cmd->add_option("--grid", grid);
    panel_cmd->add_option("--out", out_path)->required();

    auto* cc_cmd = app.add_subcommand("cover-check", "covering-space curve projection checks");
    cc_cmd->add_option("file", file)->required();
    cc_cmd->add_option("--samples", samples)->required();
    cc_cmd->add_option("--seed", seed)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (validate_cmd->parsed()) {
            fs_surface* s = nullptr;
            std::string text = slurp(file);
            fs_status st = fs_surface_parse(text.c_str(), &s);
            if (st != FS_OK) return fail(st);
            SurfaceHandle h(s);
            OwnedString report;
            int violations = 0;
            st = fs_surface_validate(s, &report.ptr, &violations);
            if (st != FS_OK) return fail(st);
            if (violations > 0) {
                std::cerr << "error: InvalidSurface: " << violations << " violation(s)\n"
                          << report.str();
                return 1;
            }
            std::cout << "valid\n";
            return 0;
        }
        if (info_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            OwnedString text;
            fs_status st = fs_surface_info(h.ptr, &text.ptr);
            if (st != FS_OK) return fail(st);
            std::cout << text.str();
            return 0;
        }
        if (gen_cmd->parsed()) {
            fs_surface* s = nullptr;
            fs_status st = fs_surface_generate(gen_name.c_str(), gen_params.data(),
                                               static_cast<int>(gen_params.size()), &s);
            if (st != FS_OK) return fail(st);
            SurfaceHandle h(s);
            OwnedString text;
            st = fs_surface_serialize(s, &text.ptr);
            if (st != FS_OK) return fail(st);
            return emit(text.str(), out_path);
        }
        if (cover_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            fs_cover* c = nullptr;
            fs_status st = fs_cover_build(h.ptr, &c);
            if (st != FS_OK) return fail(st);
            OwnedString info;
            st = fs_cover_info(c, &info.ptr);
            if (st != FS_OK) {
                fs_cover_free(c);
                return fail(st);
            }
            fs_surface* total = nullptr;
            st = fs_cover_total(c, &total);
            fs_cover_free(c);
            if (st != FS_OK) return fail(st);
            SurfaceHandle ht(total);
            OwnedString text;
            st = fs_surface_serialize(total, &text.ptr);
            if (st != FS_OK) return fail(st);
            std::ostringstream os;
            std::istringstream is(info.str());
            std::string line;
            while (std::getline(is, line)) os << "# " << line << "\n";
            os << text.str();
            return emit(os.str(), out_path);
        }
        if (flow_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            fs_surface* moved = nullptr;
            int flips = 0;
            fs_status st = fs_surface_flow(h.ptr, t, normalize ? 1 : 0, &moved, &flips);
            if (st != FS_OK) return fail(st);
            SurfaceHandle hm(moved);
            OwnedString text;
            st = fs_surface_serialize(moved, &text.ptr);
            if (st != FS_OK) return fail(st);
            std::ostringstream os;
            os << "# flips: " << flips << "\n" << text.str();
            return emit(os.str(), out_path);
        }
        if (sys_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            double value = 0;
            OwnedString report;
            fs_status st =
                fs_systole(h.ptr, depth, marked_singular ? 1 : 0, &value, &report.ptr);
            if (st != FS_OK) return fail(st);
            std::cout << report.str();
            return 0;
        }
        if (crit_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            OwnedString csv;
            fs_status st = fs_criterion_csv(h.ptr, tmax, dt, depth, &csv.ptr);
            if (st != FS_OK) return fail(st);
            return emit(csv.str(), out_path);
        }
        if (thm3_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            if (res <= 0) res = eps0 / 10;
            OwnedString csv;
            fs_status st = fs_thm3_csv(h.ptr, eta, eps0, res, tmax, dt, &csv.ptr);
            if (st != FS_OK) return fail(st);
            return emit(csv.str(), out_path);
        }
        if (trace_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            OwnedString csv, summary;
            fs_status st =
                fs_trace_csv(h.ptr, poly.c_str(), x, y, len, grid, &csv.ptr, &summary.ptr);
            if (st != FS_OK) return fail(st);
            std::cout << summary.str();
            return emit(csv.str(), out_path);
        }
        if (rm_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            auto c1 = transversal_spec.find(':');
            auto c2 = transversal_spec.rfind(':');
            auto comma = transversal_spec.find(',');
            if (c1 == std::string::npos || c2 == c1 || comma == std::string::npos ||
                comma < c1 || comma > c2) {
                std::cerr << "error: transversal must be poly:x,y:height\n";
                return 2;
            }
            std::string pid = transversal_spec.substr(0, c1);
            double tx = std::stod(transversal_spec.substr(c1 + 1, comma - c1 - 1));
            double ty = std::stod(transversal_spec.substr(comma + 1, c2 - comma - 1));
            double th = std::stod(transversal_spec.substr(c2 + 1));
            OwnedString text;
            fs_status st = fs_return_map_text(h.ptr, pid.c_str(), tx, ty, th, &text.ptr);
            if (st != FS_OK) return fail(st);
            std::cout << text.str();
            return 0;
        }
        if (panel_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            OwnedString csv;
            fs_status st = fs_panel_csv(h.ptr, starts, seed, len, grid, &csv.ptr);
            if (st != FS_OK) return fail(st);
            return emit(csv.str(), out_path);
        }
        if (cc_cmd->parsed()) {
            SurfaceHandle h;
            if (int rc = load_surface(file, h)) return rc;
            OwnedString text;
            fs_status st = fs_cover_check_text(h.ptr, samples, seed, &text.ptr);
            if (st != FS_OK) return fail(st);
            std::cout << text.str();
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
