#include "prnuda/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace prnuda {
namespace {

struct KeyEntry {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

long parse_long(const std::string& s) {
    std::size_t pos = 0;
    long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad integer: " + s);
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "true" || s == "on" || s == "1") return true;
    if (s == "false" || s == "off" || s == "0") return false;
    throw std::invalid_argument("bad bool: " + s);
}

std::vector<KeyEntry> build_table() {
    std::vector<KeyEntry> t;
    auto dbl = [&t](const char* name, double RunConfig::* p) {
        t.push_back({name,
                     [p](RunConfig& c, const std::string& s) { c.*p = parse_double(s); },
                     [p](const RunConfig& c) { return fmt_double(c.*p); }});
    };
    auto num = [&t](const char* name, int RunConfig::* p) {
        t.push_back({name,
                     [p](RunConfig& c, const std::string& s) {
                         c.*p = static_cast<int>(parse_long(s));
                     },
                     [p](const RunConfig& c) { return std::to_string(c.*p); }});
    };
    auto lng = [&t](const char* name, long RunConfig::* p) {
        t.push_back({name,
                     [p](RunConfig& c, const std::string& s) { c.*p = parse_long(s); },
                     [p](const RunConfig& c) { return std::to_string(c.*p); }});
    };
    auto bl = [&t](const char* name, bool AblationSwitches::* p) {
        t.push_back({name,
                     [p](RunConfig& c, const std::string& s) { c.sw.*p = parse_bool(s); },
                     [p](const RunConfig& c) { return c.sw.*p ? "true" : "false"; }});
    };
    auto style = [&t](const std::string& prefix, DomainStyle RunConfig::* p) {
        t.push_back({prefix + ".hue_deg",
                     [p](RunConfig& c, const std::string& s) { (c.*p).hue_deg = parse_double(s); },
                     [p](const RunConfig& c) { return fmt_double((c.*p).hue_deg); }});
        t.push_back({prefix + ".brightness",
                     [p](RunConfig& c, const std::string& s) { (c.*p).brightness = parse_double(s); },
                     [p](const RunConfig& c) { return fmt_double((c.*p).brightness); }});
        t.push_back({prefix + ".gamma",
                     [p](RunConfig& c, const std::string& s) { (c.*p).gamma = parse_double(s); },
                     [p](const RunConfig& c) { return fmt_double((c.*p).gamma); }});
        t.push_back({prefix + ".noise_sigma",
                     [p](RunConfig& c, const std::string& s) { (c.*p).noise_sigma = parse_double(s); },
                     [p](const RunConfig& c) { return fmt_double((c.*p).noise_sigma); }});
    };

    num("model.num_classes", &RunConfig::num_classes);
    num("model.enc_w1", &RunConfig::enc_w1);
    num("model.enc_w2", &RunConfig::enc_w2);
    num("model.enc_w3", &RunConfig::enc_w3);
    num("model.prn_width", &RunConfig::prn_width);
    dbl("opt.lr_encoder", &RunConfig::lr_encoder);
    dbl("opt.lr_decoder", &RunConfig::lr_decoder);
    dbl("opt.adam_beta1", &RunConfig::adam_beta1);
    dbl("opt.adam_beta2", &RunConfig::adam_beta2);
    dbl("opt.weight_decay", &RunConfig::weight_decay);
    lng("opt.total_steps", &RunConfig::total_steps);
    lng("opt.warmup_steps", &RunConfig::warmup_steps);
    dbl("opt.warmup_factor", &RunConfig::warmup_factor);
    dbl("ema.beta", &RunConfig::ema_beta);
    dbl("st.tau1", &RunConfig::tau1);
    dbl("prn.tau2", &RunConfig::tau2);
    dbl("prn.eps_min", &RunConfig::prn_eps_min);
    dbl("prn.eps_max", &RunConfig::prn_eps_max);
    dbl("loss.lambda1", &RunConfig::lambda1);
    dbl("loss.lambda2", &RunConfig::lambda2);
    dbl("fa.eps", &RunConfig::fa_eps);
    dbl("contrast.zeta", &RunConfig::zeta);
    num("contrast.anchors_per_class", &RunConfig::anchors_per_class);
    num("contrast.max_negatives", &RunConfig::max_negatives);
    dbl("aug.jitter_strength", &RunConfig::jitter_strength);
    dbl("aug.jitter_prob", &RunConfig::jitter_prob);
    dbl("aug.blur_prob", &RunConfig::blur_prob);
    dbl("aug.blur_sigma_min", &RunConfig::blur_sigma_min);
    dbl("aug.blur_sigma_max", &RunConfig::blur_sigma_max);
    dbl("aug.classmix_fraction", &RunConfig::classmix_fraction);
    num("data.image_size", &RunConfig::image_size);
    num("data.shapes_per_image", &RunConfig::shapes_per_image);
    num("data.source_count", &RunConfig::source_count);
    num("data.target_count", &RunConfig::target_count);
    num("data.val_count", &RunConfig::val_count);
    style("data.source_style", &RunConfig::source_style);
    style("data.target_style", &RunConfig::target_style);
    t.push_back({"data.root",
                 [](RunConfig& c, const std::string& s) { c.data_root = s; },
                 [](const RunConfig& c) { return c.data_root; }});
    t.push_back({"run.seed",
                 [](RunConfig& c, const std::string& s) {
                     c.seed = static_cast<std::uint64_t>(std::stoull(s));
                 },
                 [](const RunConfig& c) { return std::to_string(c.seed); }});
    lng("run.log_every", &RunConfig::log_every);
    lng("run.eval_every", &RunConfig::eval_every);
    lng("run.checkpoint_every", &RunConfig::checkpoint_every);
    t.push_back({"run.out_dir",
                 [](RunConfig& c, const std::string& s) { c.out_dir = s; },
                 [](const RunConfig& c) { return c.out_dir; }});
    bl("switch.st", &AblationSwitches::st);
    bl("switch.prn", &AblationSwitches::prn);
    bl("switch.nm", &AblationSwitches::nm);
    bl("switch.cl", &AblationSwitches::cl);
    bl("switch.fa", &AblationSwitches::fa);
    return t;
}

const std::vector<KeyEntry>& key_table() {
    static const std::vector<KeyEntry> t = build_table();
    return t;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

std::string AblationSwitches::row_name() const {
    if (!st) return "source-only";
    std::string n = "ST";
    if (prn) n += "+PRN";
    if (nm) n += "+NM";
    if (cl) n += prn ? "+CL/R" : "+CL";
    if (fa) n += "+FA";
    return n;
}

void RunConfig::validate() const {
    if (num_classes < 2) throw std::invalid_argument("config: num_classes must be >= 2");
    if (!(tau1 > 0.0 && tau1 < 1.0)) throw std::invalid_argument("config: tau1 in (0,1)");
    if (!(tau2 > 0.0 && tau2 < 1.0)) throw std::invalid_argument("config: tau2 in (0,1)");
    if (!(prn_eps_min >= 0.0 && prn_eps_min <= prn_eps_max && prn_eps_max < 1.0))
        throw std::invalid_argument("config: need 0 <= eps_min <= eps_max < 1");
    if (!(fa_eps >= 0.0 && fa_eps < 1.0))
        throw std::invalid_argument("config: fa.eps in [0,1)");
    if (zeta <= 0.0) throw std::invalid_argument("config: zeta must be > 0");
    if (total_steps <= 0) throw std::invalid_argument("config: total_steps must be > 0");
    if (classmix_fraction < 0.0 || classmix_fraction > 1.0)
        throw std::invalid_argument("config: classmix_fraction in [0,1]");
    if (image_size < 8) throw std::invalid_argument("config: image_size too small");
    // ablation lattice
    if (sw.prn && !sw.st)
        throw std::invalid_argument("config: switch.prn requires switch.st");
    if (sw.nm && !sw.prn)
        throw std::invalid_argument("config: switch.nm requires switch.prn");
    if ((sw.cl || sw.fa) && !sw.st)
        throw std::invalid_argument("config: switch.cl/fa require switch.st");
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        const std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_override(cfg, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const RunConfig& cfg) {
    std::ostringstream os;
    for (const auto& k : key_table()) os << k.name << " = " << k.get(cfg) << "\n";
    return os.str();
}

void apply_override(RunConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& k : key_table()) {
        if (k.name == key) {
            k.set(cfg, value);
            return;
        }
    }
    throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace prnuda
