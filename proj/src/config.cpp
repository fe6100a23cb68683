#include "heliumjcm/config.hpp"

#include "heliumjcm/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace heliumjcm {

std::string_view to_string(Task task) {
    switch (task) {
    case Task::SpectrumSweep: return "spectrum-sweep";
    case Task::AbsorptionMap: return "absorption-map";
    case Task::Shifts: return "shifts";
    case Task::Crossings: return "crossings";
    case Task::Rates: return "rates";
    case Task::SelfTest: return "self-test";
    }
    return "unknown";
}

Task parse_task(std::string_view text) {
    for (Task t : {Task::SpectrumSweep, Task::AbsorptionMap, Task::Shifts, Task::Crossings, Task::Rates,
                   Task::SelfTest}) {
        if (text == to_string(t))
            return t;
    }
    throw ConfigError("unknown task '" + std::string(text) + "'");
}

std::vector<double> SweepRange::values() const {
    std::vector<double> v(static_cast<std::size_t>(std::max(points, 0)));
    for (int i = 0; i < points; ++i)
        v[static_cast<std::size_t>(i)] = points == 1 ? start : start + (stop - start) * i / (points - 1);
    return v;
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return std::string(s.substr(b, e - b));
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v))
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    return static_cast<int>(v);
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes")
        return true;
    if (text == "false" || text == "0" || text == "no")
        return false;
    throw ConfigError(key + ": expected true/false, got '" + text + "'");
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty())
            out.push_back(item);
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split(text, ','))
        out.push_back(to_double(key, item));
    return out;
}

// "2,1:3,0; 1,1:2,0"
std::vector<CrossingPair> to_pairs(const std::string& key, const std::string& text) {
    std::vector<CrossingPair> out;
    for (const auto& item : split(text, ';')) {
        const auto halves = split(item, ':');
        if (halves.size() != 2)
            throw ConfigError(key + ": expected 'n,l:n',l'' pairs, got '" + item + "'");
        auto state = [&](const std::string& s) {
            const auto nl = split(s, ',');
            if (nl.size() != 2)
                throw ConfigError(key + ": bad state '" + s + "'");
            return BasisState{to_int(key, nl[0]), to_int(key, nl[1])};
        };
        out.push_back({state(halves[0]), state(halves[1])});
    }
    return out;
}

std::string axis_name(FieldAxis a) { return a == FieldAxis::BY ? "b_y" : "b_z"; }

SweepRange& sweep_of(RunConfig& c) {
    if (!c.sweep)
        c.sweep = SweepRange{};
    return *c.sweep;
}

struct Key {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

const std::vector<Key>& registry() {
    static const std::vector<Key> keys = [] {
        std::vector<Key> k;
        auto num = [&](std::string name, double RunConfig::*field) {
            k.push_back({name, [name, field](RunConfig& c, const std::string& v) { c.*field = to_double(name, v); },
                         [field](const RunConfig& c) { return fmt(c.*field); }});
        };
        auto integer = [&](std::string name, int RunConfig::*field) {
            k.push_back({name, [name, field](RunConfig& c, const std::string& v) { c.*field = to_int(name, v); },
                         [field](const RunConfig& c) { return std::to_string(c.*field); }});
        };

        k.push_back({"task", [](RunConfig& c, const std::string& v) { c.task = parse_task(v); },
                     [](const RunConfig& c) { return c.task ? std::string(to_string(*c.task)) : std::string(); }});

        k.push_back({"material.isotope", [](RunConfig& c, const std::string& v) { c.isotope = parse_isotope(v); },
                     [](const RunConfig& c) { return std::string(to_string(c.isotope)); }});
        num("material.rydberg_mev", &RunConfig::rydberg_mev);
        num("material.barrier_ev", &RunConfig::barrier_ev);
        num("material.surface_tension", &RunConfig::surface_tension);
        num("material.mass_density", &RunConfig::mass_density);

        k.push_back({"field.e_perp",
                     [](RunConfig& c, const std::string& v) {
                         c.field.e_perp = volts_per_cm(to_double("field.e_perp", v));
                         c.e_perp_set = true;
                     },
                     [](const RunConfig& c) { return fmt(to_volts_per_cm(c.field.e_perp)); }});
        k.push_back({"field.b_z",
                     [](RunConfig& c, const std::string& v) {
                         c.field.b_z = to_double("field.b_z", v);
                         c.b_z_set = true;
                     },
                     [](const RunConfig& c) { return fmt(c.field.b_z); }});
        k.push_back({"field.b_y", [](RunConfig& c, const std::string& v) { c.field.b_y = to_double("field.b_y", v); },
                     [](const RunConfig& c) { return fmt(c.field.b_y); }});
        k.push_back({"field.temperature",
                     [](RunConfig& c, const std::string& v) { c.field.temperature = to_double("field.temperature", v); },
                     [](const RunConfig& c) { return fmt(c.field.temperature); }});

        k.push_back({"sweep.axis",
                     [](RunConfig& c, const std::string& v) {
                         if (v == "b_y")
                             sweep_of(c).axis = FieldAxis::BY;
                         else if (v == "b_z")
                             sweep_of(c).axis = FieldAxis::BZ;
                         else
                             throw ConfigError("sweep.axis: expected b_y or b_z, got '" + v + "'");
                     },
                     [](const RunConfig& c) { return c.sweep ? axis_name(c.sweep->axis) : std::string(); }});
        k.push_back({"sweep.start", [](RunConfig& c, const std::string& v) { sweep_of(c).start = to_double("sweep.start", v); },
                     [](const RunConfig& c) { return c.sweep ? fmt(c.sweep->start) : std::string(); }});
        k.push_back({"sweep.stop", [](RunConfig& c, const std::string& v) { sweep_of(c).stop = to_double("sweep.stop", v); },
                     [](const RunConfig& c) { return c.sweep ? fmt(c.sweep->stop) : std::string(); }});
        k.push_back({"sweep.points", [](RunConfig& c, const std::string& v) { sweep_of(c).points = to_int("sweep.points", v); },
                     [](const RunConfig& c) { return c.sweep ? std::to_string(c.sweep->points) : std::string(); }});

        integer("basis.n_max", &RunConfig::n_max);
        integer("basis.l_max", &RunConfig::l_max);

        k.push_back({"grid.z_max", [](RunConfig& c, const std::string& v) { c.grid.z_max = to_double("grid.z_max", v); },
                     [](const RunConfig& c) { return fmt(c.grid.z_max); }});
        k.push_back({"grid.n_points", [](RunConfig& c, const std::string& v) { c.grid.n_points = to_int("grid.n_points", v); },
                     [](const RunConfig& c) { return std::to_string(c.grid.n_points); }});
        k.push_back({"grid.extrapolate",
                     [](RunConfig& c, const std::string& v) { c.grid.extrapolate_energies = to_bool("grid.extrapolate", v); },
                     [](const RunConfig& c) { return std::string(c.grid.extrapolate_energies ? "true" : "false"); }});

        num("map.mw_frequency", &RunConfig::mw_frequency);
        num("map.e_min", &RunConfig::e_min);
        num("map.e_max", &RunConfig::e_max);
        integer("map.e_points", &RunConfig::e_points);
        num("map.anchor_spacing", &RunConfig::anchor_spacing);
        integer("map.l_cut", &RunConfig::l_cut);
        num("map.min_moment_sq", &RunConfig::min_moment_sq);
        k.push_back({"map.interference",
                     [](RunConfig& c, const std::string& v) { c.interference = to_bool("map.interference", v); },
                     [](const RunConfig& c) { return std::string(c.interference ? "true" : "false"); }});

        auto broad = [&](std::string name, double BroadeningModel::*field) {
            k.push_back({name,
                         [name, field](RunConfig& c, const std::string& v) { c.broadening.*field = to_double(name, v); },
                         [field](const RunConfig& c) { return fmt(c.broadening.*field); }});
        };
        broad("broadening.base_width", &BroadeningModel::base_width);
        broad("broadening.kappa", &BroadeningModel::kappa);
        broad("broadening.density", &BroadeningModel::density);
        broad("broadening.c_f", &BroadeningModel::field_coefficient);
        broad("broadening.thermal_bz_threshold", &BroadeningModel::thermal_bz_threshold);

        k.push_back({"crossings.pairs",
                     [](RunConfig& c, const std::string& v) { c.pairs = to_pairs("crossings.pairs", v); },
                     [](const RunConfig& c) {
                         std::string s;
                         for (const auto& p : c.pairs) {
                             if (!s.empty())
                                 s += "; ";
                             s += std::to_string(p.a.n) + "," + std::to_string(p.a.l) + ":" + std::to_string(p.b.n) +
                                  "," + std::to_string(p.b.l);
                         }
                         return s;
                     }});
        num("crossings.b_z_min", &RunConfig::b_z_min);
        num("crossings.b_z_max", &RunConfig::b_z_max);
        k.push_back({"crossings.gap_b_y",
                     [](RunConfig& c, const std::string& v) { c.gap_b_y = to_list("crossings.gap_b_y", v); },
                     [](const RunConfig& c) {
                         std::string s;
                         for (double b : c.gap_b_y)
                             s += (s.empty() ? "" : ", ") + fmt(b);
                         return s;
                     }});
        integer("crossings.gap_steps", &RunConfig::gap_steps);
        integer("crossings.gap_l_count", &RunConfig::gap_l_count);
        num("crossings.family_b_y", &RunConfig::family_b_y);

        num("rates.nu_0", &RunConfig::nu_0);
        k.push_back({"rates.finite_temperature",
                     [](RunConfig& c, const std::string& v) { c.finite_temperature = to_bool("rates.finite_temperature", v); },
                     [](const RunConfig& c) { return std::string(c.finite_temperature ? "true" : "false"); }});

        integer("output.levels", &RunConfig::levels);
        k.push_back({"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                     [](const RunConfig& c) { return c.output_dir; }});
        return k;
    }();
    return keys;
}

} // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.source = source;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty())
            continue;
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(where + "unterminated section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        const std::string full = section.empty() ? key : section + "." + key;
        const auto& keys = registry();
        const auto it = std::find_if(keys.begin(), keys.end(), [&](const Key& k) { return k.name == full; });
        if (it == keys.end())
            throw ConfigError(where + "unknown key '" + full + "'");
        if (cfg.is_set(full))
            throw ConfigError(where + "duplicate key '" + full + "'");
        try {
            it->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
        cfg.set_keys.push_back(full);
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

bool RunConfig::is_set(std::string_view key) const {
    return std::find(set_keys.begin(), set_keys.end(), key) != set_keys.end();
}

std::vector<RunConfig::Entry> RunConfig::resolved() const {
    std::vector<Entry> out;
    for (const Key& k : registry())
        out.push_back({k.name, k.get(*this), is_set(k.name)});
    return out;
}

MaterialProperties RunConfig::material() const {
    const double barrier = electronvolts(barrier_ev);
    if (rydberg_mev > 0.0)
        return material_with_rydberg(isotope, millielectronvolts(rydberg_mev), barrier, surface_tension, mass_density);
    return material_for(isotope, barrier, surface_tension, mass_density);
}

void RunConfig::validate(Task t) const {
    if (task && *task != t) {
        throw ConfigError("task: config declares '" + std::string(to_string(*task)) + "' but '" +
                          std::string(to_string(t)) + "' was requested");
    }
    material().validate();
    grid.validate();
    if (n_max < 2)
        throw ConfigError("basis.n_max must be >= 2");
    if (l_max < 1)
        throw ConfigError("basis.l_max must be >= 1");
    if (field.temperature < 0.0)
        throw ConfigError("field.temperature must be >= 0");

    auto need_e_perp = [&] {
        if (!e_perp_set)
            throw ConfigError("field.e_perp is required for task " + std::string(to_string(t)));
        if (field.e_perp < 0.0)
            throw ConfigError("field.e_perp must be >= 0");
    };
    auto need_sweep = [&] {
        if (!sweep)
            throw ConfigError("[sweep] section is required for task " + std::string(to_string(t)));
        if (!is_set("sweep.axis"))
            throw ConfigError("sweep.axis is required");
        if (sweep->points < 2)
            throw ConfigError("sweep.points must be >= 2");
        if (!(sweep->stop > sweep->start))
            throw ConfigError("sweep.stop must be greater than sweep.start");
        if (!b_z_set && sweep->axis == FieldAxis::BY)
            throw ConfigError("field.b_z is required for a b_y sweep");
        if (sweep->axis == FieldAxis::BZ && sweep->start <= 0.0)
            throw ConfigError("sweep.start must be > 0 for a b_z sweep");
    };
    auto need_b_z = [&] {
        if (!b_z_set)
            throw ConfigError("field.b_z is required for task " + std::string(to_string(t)));
        if (!(field.b_z > 0.0))
            throw ConfigError("field.b_z must be positive");
    };

    switch (t) {
    case Task::SpectrumSweep:
        need_e_perp();
        need_sweep();
        if (levels < 1)
            throw ConfigError("output.levels must be >= 1");
        break;
    case Task::AbsorptionMap: {
        need_sweep();
        MapSpec spec;
        spec.sweep = sweep->values();
        spec.e_min = e_min;
        spec.e_max = e_max;
        spec.e_points = e_points;
        spec.mw_frequency = mw_frequency;
        spec.broadening = broadening;
        spec.l_cut = l_cut;
        spec.n_max = n_max;
        spec.l_max = l_max;
        spec.grid = grid;
        spec.anchor_spacing = anchor_spacing;
        spec.validate();
        if (interference) {
            if (sweep->axis != FieldAxis::BY)
                throw ConfigError("map.interference needs sweep.axis = b_y");
            if (n_max < 3)
                throw ConfigError("basis.n_max must be >= 3 for map.interference");
            need_e_perp();
        }
        break;
    }
    case Task::Shifts:
        need_e_perp();
        need_b_z();
        need_sweep();
        if (sweep->axis != FieldAxis::BY)
            throw ConfigError("sweep.axis must be b_y for task shifts");
        break;
    case Task::Crossings:
        need_e_perp();
        if (pairs.empty())
            throw ConfigError("crossings.pairs is empty");
        for (const auto& p : pairs) {
            if (std::max(p.a.n, p.b.n) > n_max || p.a.n < 1 || p.b.n < 1 || p.a.l < 0 || p.b.l < 0)
                throw ConfigError("crossings.pairs: state outside basis.n_max");
            if (std::max(p.a.l, p.b.l) + gap_l_count > l_max)
                throw ConfigError("crossings.gap_l_count too large for basis.l_max");
        }
        if (!(b_z_max > b_z_min) || b_z_min <= 0.0)
            throw ConfigError("crossings: need 0 < b_z_min < b_z_max");
        if (gap_steps < 5)
            throw ConfigError("crossings.gap_steps must be >= 5");
        if (gap_l_count < 1)
            throw ConfigError("crossings.gap_l_count must be >= 1");
        break;
    case Task::Rates:
        need_e_perp();
        if (b_z_set && !(field.b_z > 0.0))
            throw ConfigError("field.b_z must be positive");
        if (!(nu_0 > 0.0))
            throw ConfigError("rates.nu_0 must be positive");
        break;
    case Task::SelfTest:
        break;
    }
}

int recommended_l_max(const RunConfig& cfg) {
    double b_y = std::abs(cfg.field.b_y);
    double b_z = cfg.field.b_z;
    if (cfg.sweep) {
        const auto v = cfg.sweep->values();
        if (!v.empty()) {
            if (cfg.sweep->axis == FieldAxis::BY)
                b_y = std::max(std::abs(v.front()), std::abs(v.back()));
            else
                b_z = std::min(v.front(), v.back());
        }
    }
    if (b_y == 0.0)
        return 1;
    if (!(b_z > 0.0))
        return 1 << 20;
    const MaterialProperties mat = cfg.material();
    const double z = 13.5 * mat.bohr_radius;
    const double alpha = z * b_y / (std::sqrt(2.0) * magnetic_length(b_z) * b_z);
    return static_cast<int>(std::ceil(4.0 + alpha * alpha + 4.0 * alpha));
}

std::vector<std::string> RunConfig::warnings(Task t) const {
    std::vector<std::string> out;
    if (t == Task::SelfTest || t == Task::Rates)
        return out;
    const int need = recommended_l_max(*this);
    if (l_max < need) {
        out.push_back("basis.l_max = " + std::to_string(l_max) + " is below the estimated " + std::to_string(need) +
                      " for this B_y/B_z range; the convergence check will likely fail");
    }
    if (t == Task::AbsorptionMap && sweep) {
        const auto v = sweep->values();
        const double bz_min = sweep->axis == FieldAxis::BZ ? std::min(v.front(), v.back()) : field.b_z;
        if (bz_min < broadening.thermal_bz_threshold) {
            out.push_back("B_z below broadening.thermal_bz_threshold: thermal smearing uses the rms-field estimate only");
        }
    }
    return out;
}

} // namespace heliumjcm
