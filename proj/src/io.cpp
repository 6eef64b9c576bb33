#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "spinotto/errors.hpp"
#include "spinotto/io.hpp"

namespace spinotto {

using ordered_json = nlohmann::ordered_json;

const char* const sweep_csv_header =
    "tau_cycle_ms,tau_h_ms,tau_c_ms,q_h,q_c,q_l,w,eta,eta_int,power,sigma_p_sq,fano,n_spin,"
    "closed,residual";

OutputFormat parse_format(const std::string& name) {
    if (name == "csv")
        return OutputFormat::csv;
    if (name == "json")
        return OutputFormat::json;
    throw ConfigError("unknown output format '" + name + "' (expected csv or json)");
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return std::string(buf);
}

namespace {

// Round a double to its 12-significant-digit representation so JSON numbers
// match the CSV text exactly.
double round12(double v) {
    return std::stod(format_number(v));
}

std::string opt_field(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

void append_row_csv(std::ostringstream& os, const SweepRow& row) {
    const CycleRecord& r = row.record;
    if (row.error) {
        // Failed point: keep the identifying times, leave observables empty.
        os << format_number(r.tau_cycle_ms) << ',' << format_number(r.tau_h_ms) << ','
           << format_number(r.tau_c_ms) << ",,,,,,,,,,,false,\n";
        return;
    }
    os << format_number(r.tau_cycle_ms) << ',' << format_number(r.tau_h_ms) << ','
       << format_number(r.tau_c_ms) << ',' << format_number(r.q_h) << ',' << format_number(r.q_c)
       << ',' << format_number(r.q_l) << ',' << format_number(r.w) << ',' << opt_field(r.eta)
       << ',' << opt_field(r.eta_int) << ',' << format_number(r.power) << ','
       << format_number(r.sigma_p_sq) << ',' << opt_field(r.fano) << ','
       << format_number(r.n_spin) << ',' << (r.closed ? "true" : "false") << ','
       << format_number(r.closure_residual) << '\n';
}

ordered_json metadata_json(const SweepMetadata& m) {
    ordered_json j;
    j["schema_version"] = m.schema_version;
    j["seed"] = m.seed;
    j["rng"] = m.rng_algorithm;
    j["rate_table_fnv1a"] = m.rate_table_hash;
    j["constants"] = m.constants_version;
    j["pairing"] = m.pairing;
    j["n_traj"] = m.n_traj;
    return j;
}

ordered_json row_json(const SweepRow& row) {
    const CycleRecord& r = row.record;
    ordered_json j;
    j["tau_cycle_ms"] = round12(r.tau_cycle_ms);
    j["tau_h_ms"] = round12(r.tau_h_ms);
    j["tau_c_ms"] = round12(r.tau_c_ms);
    if (row.error) {
        j["error"] = *row.error;
        return j;
    }
    j["q_h"] = round12(r.q_h);
    j["q_c"] = round12(r.q_c);
    j["q_l"] = round12(r.q_l);
    j["w"] = round12(r.w);
    j["eta"] = r.eta ? ordered_json(round12(*r.eta)) : ordered_json(nullptr);
    j["eta_int"] = r.eta_int ? ordered_json(round12(*r.eta_int)) : ordered_json(nullptr);
    j["power"] = round12(r.power);
    j["sigma_p_sq"] = round12(r.sigma_p_sq);
    j["fano"] = r.fano ? ordered_json(round12(*r.fano)) : ordered_json(nullptr);
    j["n_spin"] = round12(r.n_spin);
    j["closed"] = r.closed;
    j["residual"] = round12(r.closure_residual);
    j["iterations"] = row.iterations;
    if (row.mc) {
        ordered_json m;
        m["n_traj"] = row.mc->n_traj;
        m["mean_quanta_h"] = round12(row.mc->mean_quanta_h);
        m["mean_quanta_c"] = round12(row.mc->mean_quanta_c);
        m["z_heating"] = round12(row.mc->z_heating);
        m["z_cooling"] = round12(row.mc->z_cooling);
        m["consistent"] = row.mc->consistent;
        j["mc"] = m;
    }
    return j;
}

} // namespace

std::string to_csv(const SweepResult& result) {
    std::ostringstream os;
    os << sweep_csv_header << '\n';
    for (const SweepRow& row : result.rows) append_row_csv(os, row);
    return os.str();
}

std::string to_json(const SweepResult& result) {
    ordered_json j;
    j["metadata"] = metadata_json(result.metadata);
    j["argmax_power"] = result.argmax_power ? ordered_json(*result.argmax_power)
                                            : ordered_json(nullptr);
    j["fano_crossing_ms"] = result.fano_crossing_ms ? ordered_json(round12(*result.fano_crossing_ms))
                                                    : ordered_json(nullptr);
    j["rows"] = ordered_json::array();
    for (const SweepRow& row : result.rows) j["rows"].push_back(row_json(row));
    return j.dump(2) + "\n";
}

std::string cycle_to_json(const CycleRecord& r) {
    ordered_json j;
    j["tau_cycle_ms"] = round12(r.tau_cycle_ms);
    j["tau_h_ms"] = round12(r.tau_h_ms);
    j["tau_c_ms"] = round12(r.tau_c_ms);
    j["bath_swap_ms"] = round12(r.bath_swap_ms);
    auto dist = [](const LevelDistribution& d) {
        ordered_json a = ordered_json::array();
        for (int i = 0; i < LevelDistribution::n_levels; ++i) a.push_back(round12(d[i]));
        return a;
    };
    j["dist_a"] = dist(r.dist_a);
    j["dist_b"] = dist(r.dist_b);
    j["dist_c"] = dist(r.dist_c);
    j["dist_d"] = dist(r.dist_d);
    j["dist_a_next"] = dist(r.dist_a_next);
    j["q_h"] = round12(r.q_h);
    j["q_c"] = round12(r.q_c);
    j["q1"] = round12(r.ledger.q1);
    j["q2"] = round12(r.ledger.q2);
    j["q_l"] = round12(r.q_l);
    j["w_bc"] = round12(r.w_bc);
    j["w_da"] = round12(r.w_da);
    j["w"] = round12(r.w);
    j["eta"] = r.eta ? ordered_json(round12(*r.eta)) : ordered_json(nullptr);
    j["eta_int"] = r.eta_int ? ordered_json(round12(*r.eta_int)) : ordered_json(nullptr);
    j["power"] = round12(r.power);
    j["sigma_w_sq"] = round12(r.sigma_w_sq);
    j["sigma_p_sq"] = round12(r.sigma_p_sq);
    j["fano"] = r.fano ? ordered_json(round12(*r.fano)) : ordered_json(nullptr);
    j["n_heating"] = round12(r.n_heating);
    j["n_cooling"] = round12(r.n_cooling);
    j["n_spin"] = round12(r.n_spin);
    auto ramp = [](const AdiabaticityReport& rep) {
        ordered_json a;
        a["b_from_mG"] = round12(rep.b_from_mG);
        a["b_to_mG"] = round12(rep.b_to_mG);
        a["a_start"] = round12(rep.a_start);
        a["a_end"] = round12(rep.a_end);
        a["a_max"] = round12(rep.a_max);
        a["threshold"] = round12(rep.threshold);
        a["passes"] = rep.passes;
        return a;
    };
    j["ramp_down"] = ramp(r.ramp_down);
    j["ramp_up"] = ramp(r.ramp_up);
    j["closed"] = r.closed;
    j["residual"] = round12(r.closure_residual);
    j["first_law_residual"] = round12(r.q_h + r.q_c + r.w_bc + r.w_da);
    return j.dump(2) + "\n";
}

Config default_config() {
    return Config{};
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write '" + path + "'");
    out << content;
    if (!out)
        throw IoError("write to '" + path + "' failed");
}

namespace {

LevelDistribution parse_initial(const std::string& word) {
    if (word == "polarized")
        return LevelDistribution::polarized();
    if (word == "inverted")
        return LevelDistribution::inverted();
    if (word == "uniform")
        return LevelDistribution::uniform();
    throw ConfigError("cycle.initial must be polarized, inverted, uniform or 7 probabilities");
}

PairingRule parse_pairing(const std::string& word) {
    if (word == "even")
        return PairingRule::even;
    if (word == "closure")
        return PairingRule::closure;
    throw ConfigError("sweep.pairing must be 'even' or 'closure'");
}

// ---- INI dialect -----------------------------------------------------------

struct IniData {
    // section -> key -> list of values (scalars hold one entry)
    std::map<std::string, std::map<std::string, std::vector<std::string>>> sections;
};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

IniData parse_ini(const std::string& text) {
    IniData ini;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t cut = line.find_first_of("#;");
        if (cut != std::string::npos)
            line = line.substr(0, cut);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            ini.sections[section];
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        std::vector<std::string> items;
        std::istringstream vs(value);
        std::string item;
        while (std::getline(vs, item, ',')) items.push_back(trim(item));
        if (items.empty())
            items.push_back("");
        ini.sections[section][key] = items;
    }
    return ini;
}

double to_double(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": cannot parse number '" + s + "'");
    }
}

long long to_int(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(what + ": cannot parse integer '" + s + "'");
    }
}

Config config_from_ini(const IniData& ini) {
    Config cfg = default_config();
    CycleSpec& cy = cfg.sweep.base;

    // Apply rates.uniform before any per-link lists so the lists win
    // regardless of file order.
    if (auto rs = ini.sections.find("rates"); rs != ini.sections.end()) {
        if (auto it = rs->second.find("uniform"); it != rs->second.end()) {
            if (it->second.size() != 1)
                throw ConfigError("rates.uniform: expected a single rate");
            cy.rates = RateTable::uniform(to_double(it->second[0], "rates.uniform"));
        }
    }

    for (const auto& [section, keys] : ini.sections) {
        for (const auto& [key, items] : keys) {
            const std::string where = section + "." + key;
            auto scalar = [&]() -> const std::string& {
                if (items.size() != 1)
                    throw ConfigError(where + ": expected a single value");
                return items[0];
            };
            auto rate_list = [&]() {
                if (items.size() != static_cast<std::size_t>(constants::max_quanta))
                    throw ConfigError(where + ": expected 6 comma-separated rates");
                std::array<double, constants::max_quanta> a{};
                for (std::size_t i = 0; i < a.size(); ++i) a[i] = to_double(items[i], where);
                return a;
            };

            if (section == "constants") {
                if (key == "g_medium")
                    cy.coupling = CouplingConstants::from_g_factors(
                        to_double(scalar(), where), cy.coupling.g_bath());
                else if (key == "g_bath")
                    cy.coupling = CouplingConstants::from_g_factors(cy.coupling.g_medium(),
                                                                    to_double(scalar(), where));
                else
                    throw ConfigError("unknown key " + where);
            } else if (section == "field") {
                if (key == "b1_mG")
                    cy.field.b1_mG = to_double(scalar(), where);
                else if (key == "b2_mG")
                    cy.field.b2_mG = to_double(scalar(), where);
                else if (key == "ramp_ms")
                    cy.field.ramp_ms = to_double(scalar(), where);
                else
                    throw ConfigError("unknown key " + where);
            } else if (section == "rates") {
                if (key == "uniform")
                    ; // already applied above
                else if (key == "heating")
                    cy.rates.heating = rate_list();
                else if (key == "cooling")
                    cy.rates.cooling = rate_list();
                else
                    throw ConfigError("unknown key " + where);
            } else if (section == "cycle") {
                if (key == "tau_h_ms")
                    cy.tau_h_ms = to_double(scalar(), where);
                else if (key == "tau_c_ms")
                    cy.tau_c_ms = to_double(scalar(), where);
                else if (key == "bath_swap_ms")
                    cy.bath_swap_ms = to_double(scalar(), where);
                else if (key == "adiabaticity_threshold")
                    cy.adiabaticity_threshold = to_double(scalar(), where);
                else if (key == "closure_tol")
                    cy.closure_tol = to_double(scalar(), where);
                else if (key == "initial") {
                    if (items.size() == 1) {
                        cy.initial = parse_initial(items[0]);
                    } else if (items.size() == static_cast<std::size_t>(constants::n_levels)) {
                        std::array<double, constants::n_levels> p{};
                        for (std::size_t i = 0; i < p.size(); ++i)
                            p[i] = to_double(items[i], where);
                        cy.initial = LevelDistribution::from_probabilities(p);
                    } else {
                        throw ConfigError(where + ": expected a name or 7 probabilities");
                    }
                } else
                    throw ConfigError("unknown key " + where);
            } else if (section == "sweep") {
                if (key == "tau_min_ms")
                    cfg.sweep.tau_min_ms = to_double(scalar(), where);
                else if (key == "tau_max_ms")
                    cfg.sweep.tau_max_ms = to_double(scalar(), where);
                else if (key == "steps")
                    cfg.sweep.steps = static_cast<int>(to_int(scalar(), where));
                else if (key == "pairing")
                    cfg.sweep.pairing = parse_pairing(scalar());
                else if (key == "n_traj")
                    cfg.sweep.n_traj = static_cast<std::size_t>(to_int(scalar(), where));
                else if (key == "max_workers")
                    cfg.sweep.max_workers = static_cast<int>(to_int(scalar(), where));
                else
                    throw ConfigError("unknown key " + where);
            } else if (section == "run") {
                if (key == "seed")
                    cfg.sweep.seed = static_cast<std::uint64_t>(to_int(scalar(), where));
                else
                    throw ConfigError("unknown key " + where);
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }
    return cfg;
}

// ---- JSON ------------------------------------------------------------------

void expect_keys(const ordered_json& obj, const std::string& where,
                 std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("unknown key " + where + "." + it.key());
    }
}

Config config_from_json(const ordered_json& j) {
    Config cfg = default_config();
    CycleSpec& cy = cfg.sweep.base;
    if (!j.is_object())
        throw ConfigError("config root must be an object");
    expect_keys(j, "$", {"constants", "field", "rates", "cycle", "sweep", "run"});

    try {
        if (j.contains("constants")) {
            const auto& c = j.at("constants");
            expect_keys(c, "constants", {"g_medium", "g_bath"});
            double gm = c.value("g_medium", 0.25);
            double gb = c.value("g_bath", 0.5);
            cy.coupling = CouplingConstants::from_g_factors(gm, gb);
        }
        if (j.contains("field")) {
            const auto& f = j.at("field");
            expect_keys(f, "field", {"b1_mG", "b2_mG", "ramp_ms"});
            cy.field.b1_mG = f.value("b1_mG", cy.field.b1_mG);
            cy.field.b2_mG = f.value("b2_mG", cy.field.b2_mG);
            cy.field.ramp_ms = f.value("ramp_ms", cy.field.ramp_ms);
        }
        if (j.contains("rates")) {
            const auto& r = j.at("rates");
            expect_keys(r, "rates", {"uniform", "heating", "cooling"});
            if (r.contains("uniform"))
                cy.rates = RateTable::uniform(r.at("uniform").get<double>());
            if (r.contains("heating")) {
                auto v = r.at("heating").get<std::vector<double>>();
                if (v.size() != static_cast<std::size_t>(constants::max_quanta))
                    throw ConfigError("rates.heating: expected 6 rates");
                std::copy(v.begin(), v.end(), cy.rates.heating.begin());
            }
            if (r.contains("cooling")) {
                auto v = r.at("cooling").get<std::vector<double>>();
                if (v.size() != static_cast<std::size_t>(constants::max_quanta))
                    throw ConfigError("rates.cooling: expected 6 rates");
                std::copy(v.begin(), v.end(), cy.rates.cooling.begin());
            }
        }
        if (j.contains("cycle")) {
            const auto& c = j.at("cycle");
            expect_keys(c, "cycle",
                        {"tau_h_ms", "tau_c_ms", "bath_swap_ms", "adiabaticity_threshold",
                         "closure_tol", "initial"});
            cy.tau_h_ms = c.value("tau_h_ms", cy.tau_h_ms);
            cy.tau_c_ms = c.value("tau_c_ms", cy.tau_c_ms);
            cy.bath_swap_ms = c.value("bath_swap_ms", cy.bath_swap_ms);
            cy.adiabaticity_threshold = c.value("adiabaticity_threshold", cy.adiabaticity_threshold);
            cy.closure_tol = c.value("closure_tol", cy.closure_tol);
            if (c.contains("initial")) {
                const auto& ini = c.at("initial");
                if (ini.is_string()) {
                    cy.initial = parse_initial(ini.get<std::string>());
                } else {
                    auto v = ini.get<std::vector<double>>();
                    if (v.size() != static_cast<std::size_t>(constants::n_levels))
                        throw ConfigError("cycle.initial: expected 7 probabilities");
                    std::array<double, constants::n_levels> p{};
                    std::copy(v.begin(), v.end(), p.begin());
                    cy.initial = LevelDistribution::from_probabilities(p);
                }
            }
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            expect_keys(s, "sweep",
                        {"tau_min_ms", "tau_max_ms", "steps", "pairing", "n_traj", "max_workers",
                         "pairs"});
            cfg.sweep.tau_min_ms = s.value("tau_min_ms", cfg.sweep.tau_min_ms);
            cfg.sweep.tau_max_ms = s.value("tau_max_ms", cfg.sweep.tau_max_ms);
            cfg.sweep.steps = s.value("steps", cfg.sweep.steps);
            if (s.contains("pairing"))
                cfg.sweep.pairing = parse_pairing(s.at("pairing").get<std::string>());
            cfg.sweep.n_traj = s.value("n_traj", cfg.sweep.n_traj);
            cfg.sweep.max_workers = s.value("max_workers", cfg.sweep.max_workers);
            if (s.contains("pairs")) {
                for (const auto& pr : s.at("pairs")) {
                    auto v = pr.get<std::vector<double>>();
                    if (v.size() != 2)
                        throw ConfigError("sweep.pairs entries must be [tau_h, tau_c]");
                    cfg.sweep.explicit_pairs.emplace_back(v[0], v[1]);
                }
            }
        }
        if (j.contains("run")) {
            const auto& r = j.at("run");
            expect_keys(r, "run", {"seed"});
            cfg.sweep.seed = r.value("seed", cfg.sweep.seed);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config JSON: ") + e.what());
    }
    return cfg;
}

} // namespace

Config parse_config_text(const std::string& text, bool prefer_json) {
    std::string head = trim(text);
    bool looks_json = !head.empty() && head.front() == '{';
    if (prefer_json || looks_json) {
        ordered_json j;
        try {
            j = ordered_json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("config JSON parse error: ") + e.what());
        }
        return config_from_json(j);
    }
    return config_from_ini(parse_ini(text));
}

Config load_config(const std::string& path) {
    std::string text = read_text_file(path);
    bool prefer_json = path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0;
    Config cfg = parse_config_text(text, prefer_json);
    cfg.sweep.base.validate();
    return cfg;
}

std::string emit_plot_script(const std::string& csv_path) {
    if (csv_path.empty())
        throw DomainError("plot script needs a data file path");
    std::ostringstream os;
    os << "# gnuplot script for a sweep CSV (generated; never auto-executed)\n"
       << "set datafile separator ','\n"
       << "data = '" << csv_path << "'\n"
       << "set key autotitle columnhead\n"
       << "set terminal pngcairo size 900,1100\n"
       << "set output 'sweep.png'\n"
       << "set multiplot layout 3,1\n"
       << "set xlabel 'cycle time (ms)'\n"
       << "set ylabel 'P / k_B (nK/ms)'\n"
       << "plot data using 1:10 with linespoints title 'power'\n"
       << "set ylabel 'efficiency'\n"
       << "plot data using 1:8 with linespoints title 'eta', \\\n"
       << "     data using 1:9 with linespoints title 'eta_int'\n"
       << "set ylabel 'Fano factor'\n"
       << "set logscale y\n"
       << "plot data using 1:12 with linespoints title 'F_P', 1 with lines dashtype 2 notitle\n"
       << "unset multiplot\n";
    return os.str();
}

} // namespace spinotto
