#include "fkcell/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace fkcell::io {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' has non-numeric value '" +
                                    v + "'");
    }
    if (pos != v.size())
        throw std::invalid_argument("config: key '" + key + "' has trailing junk in '" +
                                    v + "'");
    return x;
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    const int i = int(x);
    if (double(i) != x)
        throw std::invalid_argument("config: key '" + key + "' must be an integer");
    return i;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    if (out.empty())
        throw std::invalid_argument("config: key '" + key + "' has an empty list");
    return out;
}

}  // namespace

const char* kCsvHeader =
    "eps,E1,E2,lead1,lead2,res1,res2,mu_star,e_star,sup_grad_v,sup_grad_w,dofs,iters";

std::string format_double(double x, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", precision, x);
    return buf;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not of the form 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " has an empty key or value");

        if (key == "shape.kind") cfg.shape_kind = val;
        else if (key == "shape.r") cfg.shape_r = to_double(key, val);
        else if (key == "shape.a") cfg.shape_a = to_double(key, val);
        else if (key == "shape.b") cfg.shape_b = to_double(key, val);
        else if (key == "shape.m") cfg.shape_m = to_double(key, val);
        else if (key == "shape.f") cfg.shape_f = to_double(key, val);
        else if (key == "lame.lambda") cfg.lambda = to_double(key, val);
        else if (key == "lame.mu") cfg.mu = to_double(key, val);
        else if (key == "cell.eps") cfg.eps = to_double(key, val);
        else if (key == "cell.eps_list") cfg.eps_list = to_list(key, val);
        else if (key == "cell.L1") cfg.L1 = to_double(key, val);
        else if (key == "cell.L2") cfg.L2 = to_double(key, val);
        else if (key == "solver.n1") cfg.n1 = to_int(key, val);
        else if (key == "solver.n2") cfg.n2 = to_int(key, val);
        else if (key == "solver.grading") cfg.grading = to_double(key, val);
        else if (key == "solver.tol") cfg.tol = to_double(key, val);
        else if (key == "integral.m") cfg.integral_m = to_double(key, val);
        else if (key == "integral.kappa0") cfg.integral_kappa0 = to_double(key, val);
        else if (key == "integral.eps") cfg.integral_eps = to_double(key, val);
        else if (key == "integral.s") cfg.integral_s = to_double(key, val);
        else if (key == "aux.points") cfg.aux_points = to_int(key, val);
        else if (key == "output.csv") cfg.csv_path = val;
        else if (key == "output.precision") cfg.precision = to_int(key, val);
        else if (key == "output.polygon_points") cfg.polygon_points = to_int(key, val);
        else
            throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string canonical_text(const RunConfig& cfg) {
    // Keys are emitted in sorted order; only set fields appear.
    std::map<std::string, std::string> kv;
    auto put_d = [&](const char* k, double v) { kv[k] = format_double(v); };
    auto put_opt = [&](const char* k, const std::optional<double>& v) {
        if (v) kv[k] = format_double(*v);
    };

    if (!cfg.shape_kind.empty()) kv["shape.kind"] = cfg.shape_kind;
    put_opt("shape.r", cfg.shape_r);
    put_opt("shape.a", cfg.shape_a);
    put_opt("shape.b", cfg.shape_b);
    put_opt("shape.m", cfg.shape_m);
    put_opt("shape.f", cfg.shape_f);
    put_d("lame.lambda", cfg.lambda);
    put_d("lame.mu", cfg.mu);
    put_opt("cell.eps", cfg.eps);
    if (!cfg.eps_list.empty()) {
        std::string list;
        for (std::size_t k = 0; k < cfg.eps_list.size(); ++k) {
            if (k) list += ",";
            list += format_double(cfg.eps_list[k]);
        }
        kv["cell.eps_list"] = list;
    }
    put_opt("cell.L1", cfg.L1);
    put_opt("cell.L2", cfg.L2);
    kv["solver.n1"] = std::to_string(cfg.n1);
    kv["solver.n2"] = std::to_string(cfg.n2);
    put_d("solver.grading", cfg.grading);
    put_d("solver.tol", cfg.tol);
    put_opt("integral.m", cfg.integral_m);
    put_opt("integral.kappa0", cfg.integral_kappa0);
    put_opt("integral.eps", cfg.integral_eps);
    put_opt("integral.s", cfg.integral_s);
    kv["aux.points"] = std::to_string(cfg.aux_points);
    kv["output.csv"] = cfg.csv_path;
    kv["output.precision"] = std::to_string(cfg.precision);
    kv["output.polygon_points"] = std::to_string(cfg.polygon_points);

    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

geom::InclusionShape shape_from_config(const RunConfig& cfg) {
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v)
            throw std::invalid_argument(std::string("config: shape.kind '") +
                                        cfg.shape_kind + "' requires " + name);
        return *v;
    };
    geom::InclusionShape shape;
    if (cfg.shape_kind == "circle") {
        const double r = need(cfg.shape_r, "shape.r");
        shape = geom::Ellipse{r, r};
    } else if (cfg.shape_kind == "ellipse") {
        shape = geom::Ellipse{need(cfg.shape_a, "shape.a"), need(cfg.shape_b, "shape.b")};
    } else if (cfg.shape_kind == "mconvex") {
        shape = geom::MConvex{need(cfg.shape_m, "shape.m"), need(cfg.shape_r, "shape.r")};
    } else if (cfg.shape_kind == "vigdergauz") {
        shape = geom::vigdergauz_solve(need(cfg.shape_f, "shape.f"));
    } else {
        throw std::invalid_argument("config: unknown shape.kind '" + cfg.shape_kind + "'");
    }
    geom::validate(shape);
    return shape;
}

LameParams lame_from_config(const RunConfig& cfg) {
    const LameParams lame{cfg.lambda, cfg.mu};
    lame.validate();
    return lame;
}

std::string csv_row(const asym::SweepRow& r, int precision) {
    auto f = [&](double x) { return format_double(x, precision); };
    std::string out;
    out += f(r.eps);
    for (double v : {r.E1, r.E2, r.lead1, r.lead2, r.res1, r.res2, r.mu_star, r.e_star,
                     r.sup_grad_v, r.sup_grad_w})
        out += "," + f(v);
    out += "," + std::to_string(r.dofs);
    out += "," + std::to_string(r.iters);
    return out;
}

}  // namespace fkcell::io
