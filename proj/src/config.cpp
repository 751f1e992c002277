#include "fwi/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace fwi {

GridSpec ExperimentConfig::coarse_grid() const { return {lx, ly, nx, ny, dt, nt}; }

GridSpec ExperimentConfig::fine_grid() const {
    return {lx, ly, fine_nx, fine_ny, fine_dt, fine_nt};
}

Acquisition ExperimentConfig::acquisition() const {
    Acquisition a;
    a.grid = coarse_grid();
    a.sources = top_edge_line(a.grid, source_count, source_spacing);
    a.receivers = top_edge_line(a.grid, receiver_count, receiver_spacing);
    return a;
}

Physics ExperimentConfig::physics() const {
    Physics p;
    p.rho0 = rho0;
    p.c0 = c0;
    p.burst = SineBurst{a0, kc, nc};
    p.allow_unstable = allow_unstable;
    return p;
}

InversionConfig ExperimentConfig::inversion_config(Method m) const {
    InversionConfig c;
    c.method = m;
    c.sched = {sched_alpha, sched_beta};
    c.seed = seed;
    switch (m) {
        case Method::conventional:
            c.lr = lr_conventional;
            c.clip = clip_conventional;
            c.cost_scale = scale_conventional;
            break;
        case Method::nn_based:
            c.lr = lr_nn;
            c.clip = clip_nn;
            c.cost_scale = scale_nn;
            break;
        case Method::conventional_with_init:
            c.lr = lr_conv_init;
            c.clip = clip_conv_init;
            c.cost_scale = scale_conv_init;
            break;
        case Method::transfer:
            c.lr = lr_transfer;
            c.clip = clip_transfer;
            c.cost_scale = scale_transfer;
            break;
    }
    return c;
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig t;
    t.epochs = pretrain_epochs;
    t.batch = pretrain_batch;
    t.lr = pretrain_lr;
    t.clip = pretrain_clip;
    t.sched = {sched_alpha, sched_beta};
    t.val_fraction = pretrain_val_fraction;
    t.seed = seed;
    return t;
}

void ExperimentConfig::validate() const {
    coarse_grid().validate();
    fine_grid().validate();
    acquisition();  // throws on out-of-bounds layout
    physics().burst.validate();
    if (source_count < 1 || receiver_count < 1 || source_spacing < 1 || receiver_spacing < 1)
        throw ConfigError("config: sensor layout counts and spacings must be positive");
    if (pretrain_val_fraction < 0.0 || pretrain_val_fraction >= 1.0)
        throw ConfigError("config: pretrain_val_fraction must be in [0, 1)");
    if (pretrain_epochs < 0 || pretrain_batch < 0)
        throw ConfigError("config: negative pretraining settings");
    for (double v : {lr_conventional, lr_nn, lr_conv_init, lr_transfer, clip_conventional,
                     clip_nn, clip_conv_init, clip_transfer, scale_conventional, scale_nn,
                     scale_conv_init, scale_transfer, pretrain_lr, pretrain_clip})
        if (!(v > 0.0)) throw ConfigError("config: hyperparameters must be positive");
}

namespace {

double stable_dt(double c0, double lx, double ly, int nx, int ny, double target) {
    const double dx = lx / (nx - 1), dy = ly / (ny - 1);
    return target / (c0 * std::sqrt(1.0 / (dx * dx) + 1.0 / (dy * dy)));
}

}  // namespace

ExperimentConfig profile_config(const std::string& name) {
    ExperimentConfig c;
    if (name == "desk") {
        c.nx = 128;
        c.ny = 64;
        c.nt = 500;
        c.dt = stable_dt(c.c0, c.lx, c.ly, c.nx, c.ny, 0.6);
        c.source_spacing = 18;
        c.receiver_spacing = 3;
        // Sized so every method's scaled gradient exceeds its clip threshold,
        // the regime the published learning rates and clips were tuned in.
        c.a0 = 1e9;
    } else if (name == "paper") {
        c.nx = 256;
        c.ny = 128;
        c.nt = 1000;
        // The published 6e-8 s step exceeds the explicit stability bound under
        // this dx convention; ship a stable step instead.
        c.dt = stable_dt(c.c0, c.lx, c.ly, c.nx, c.ny, 0.9);
        c.source_spacing = 36;
        c.receiver_spacing = 6;
        c.a0 = 1.0;
    } else {
        throw ConfigError("unknown profile '" + name + "' (desk|paper)");
    }
    c.fine_nx = 2 * c.nx;
    c.fine_ny = 2 * c.ny;
    c.fine_nt = 2 * c.nt;
    c.fine_dt = 0.5 * c.dt;
    return c;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct KeyBinding {
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw ConfigError("bad numeric value '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw ConfigError("bad integer value '" + s + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& s) {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(s, &pos);
    if (pos != s.size()) throw ConfigError("bad integer value '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("bad boolean value '" + s + "'");
}

#define DBL_KEY(name, field)                                                      \
    {name, [](ExperimentConfig& c, const std::string& v) { c.field = parse_double(v); }, \
     [](const ExperimentConfig& c) { return fmt_double(c.field); }}
#define INT_KEY(name, field)                                                   \
    {name, [](ExperimentConfig& c, const std::string& v) { c.field = parse_int(v); }, \
     [](const ExperimentConfig& c) { return std::to_string(c.field); }}

const std::vector<KeyBinding>& bindings() {
    static const std::vector<KeyBinding> b = {
        DBL_KEY("rho0", rho0),
        DBL_KEY("c0", c0),
        DBL_KEY("kc", kc),
        DBL_KEY("nc", nc),
        DBL_KEY("a0", a0),
        INT_KEY("nx", nx),
        INT_KEY("ny", ny),
        INT_KEY("nt", nt),
        DBL_KEY("dt", dt),
        DBL_KEY("lx", lx),
        DBL_KEY("ly", ly),
        INT_KEY("fine_nx", fine_nx),
        INT_KEY("fine_ny", fine_ny),
        INT_KEY("fine_nt", fine_nt),
        DBL_KEY("fine_dt", fine_dt),
        INT_KEY("source_count", source_count),
        INT_KEY("source_spacing", source_spacing),
        INT_KEY("receiver_count", receiver_count),
        INT_KEY("receiver_spacing", receiver_spacing),
        DBL_KEY("lr_conventional", lr_conventional),
        DBL_KEY("lr_nn", lr_nn),
        DBL_KEY("lr_conv_init", lr_conv_init),
        DBL_KEY("lr_transfer", lr_transfer),
        DBL_KEY("clip_conventional", clip_conventional),
        DBL_KEY("clip_nn", clip_nn),
        DBL_KEY("clip_conv_init", clip_conv_init),
        DBL_KEY("clip_transfer", clip_transfer),
        DBL_KEY("scale_conventional", scale_conventional),
        DBL_KEY("scale_nn", scale_nn),
        DBL_KEY("scale_conv_init", scale_conv_init),
        DBL_KEY("scale_transfer", scale_transfer),
        DBL_KEY("sched_alpha", sched_alpha),
        DBL_KEY("sched_beta", sched_beta),
        DBL_KEY("pretrain_lr", pretrain_lr),
        DBL_KEY("pretrain_clip", pretrain_clip),
        INT_KEY("pretrain_epochs", pretrain_epochs),
        INT_KEY("pretrain_batch", pretrain_batch),
        DBL_KEY("pretrain_val_fraction", pretrain_val_fraction),
        {"seed", [](ExperimentConfig& c, const std::string& v) { c.seed = parse_u64(v); },
         [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
        {"allow_unstable",
         [](ExperimentConfig& c, const std::string& v) { c.allow_unstable = parse_bool(v); },
         [](const ExperimentConfig& c) { return c.allow_unstable ? "true" : "false"; }},
        {"out_dir", [](ExperimentConfig& c, const std::string& v) { c.out_dir = v; },
         [](const ExperimentConfig& c) { return c.out_dir; }},
    };
    return b;
}

#undef DBL_KEY
#undef INT_KEY

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base) {
    ExperimentConfig cfg = base;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& b : bindings())
            if (key == b.key) {
                b.set(cfg, val);
                found = true;
                break;
            }
        if (!found) throw ConfigError("config line " + std::to_string(lineno) +
                                      ": unknown key '" + key + "'");
    }
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& base) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str(), base);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    for (const auto& b : bindings()) os << b.key << " = " << b.get(cfg) << "\n";
    return os.str();
}

}  // namespace fwi
