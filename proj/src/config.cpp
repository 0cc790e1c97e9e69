#include "cluvir/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cluvir {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

PieceShape shape_from_string(const std::string& s) {
    if (s == "constant") return PieceShape::Constant;
    if (s == "ramp") return PieceShape::Ramp;
    throw std::invalid_argument("unknown piece shape: " + s);
}

struct RawSection {
    std::vector<std::pair<std::string, std::string>> items;

    const std::string* find(const std::string& key) const {
        for (const auto& [k, v] : items)
            if (k == key) return &v;
        return nullptr;
    }
};

std::map<std::string, RawSection> parse_sections(std::istream& is) {
    std::map<std::string, RawSection> sections;
    std::string line, current = "";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            current = trim(t.substr(1, t.size() - 2));
            sections[current];
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value: " + t);
        sections[current].items.emplace_back(trim(t.substr(0, eq)),
                                             trim(t.substr(eq + 1)));
    }
    return sections;
}

PairPotential potential_from_section(const RawSection& sec) {
    std::string kind = "custom";
    if (const auto* k = sec.find("kind")) kind = *k;

    if (kind == "custom") {
        double r_hc = 0.0;
        int dim = 1;
        if (const auto* v = sec.find("hard_core_radius")) r_hc = std::stod(*v);
        if (const auto* v = sec.find("dimension")) dim = std::stoi(*v);
        std::vector<PotentialPiece> pieces;
        for (const auto& [key, value] : sec.items) {
            if (key != "piece") continue;
            std::istringstream ss(value);
            double r_lo, r_hi, v_lo, v_hi;
            std::string shape;
            if (!(ss >> r_lo >> r_hi >> shape >> v_lo))
                throw std::invalid_argument("malformed piece: " + value);
            PieceShape sh = shape_from_string(shape);
            if (sh == PieceShape::Ramp) {
                if (!(ss >> v_hi))
                    throw std::invalid_argument(
                        "ramp piece needs two values: " + value);
            } else {
                v_hi = v_lo;
            }
            pieces.push_back({r_lo, r_hi, sh, v_lo, v_hi});
        }
        if (pieces.empty())
            throw std::invalid_argument("custom potential without pieces");
        return PairPotential(r_hc, dim, std::move(pieces));
    }

    std::map<std::string, double> params;
    for (const auto& [key, value] : sec.items) {
        if (key == "kind") continue;
        if (key == "piece")
            throw std::invalid_argument(
                "piece entries only apply to kind = custom");
        params[key] = std::stod(value);
    }
    return make_builtin(builtin_kind_from_string(kind), params);
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

PairPotential potential_from_spec(const std::string& spec) {
    // Inline form: "square_well:r_hc=1,b=1.5,depth=1" or bare builtin name.
    auto colon = spec.find(':');
    bool looks_inline = spec == "square_well" || spec == "ramp_well" ||
                        spec == "two_well" || spec == "soft_disk" ||
                        colon != std::string::npos;
    if (looks_inline && spec.find('/') == std::string::npos &&
        spec.find(".cfg") == std::string::npos) {
        std::string name = colon == std::string::npos ? spec
                                                      : spec.substr(0, colon);
        std::map<std::string, double> params;
        if (colon != std::string::npos) {
            std::istringstream ss(spec.substr(colon + 1));
            std::string kv;
            while (std::getline(ss, kv, ',')) {
                auto eq = kv.find('=');
                if (eq == std::string::npos)
                    throw std::invalid_argument("malformed parameter: " + kv);
                params[trim(kv.substr(0, eq))] = std::stod(kv.substr(eq + 1));
            }
        }
        return make_builtin(builtin_kind_from_string(name), params);
    }
    std::ifstream file(spec);
    if (!file)
        throw std::invalid_argument("cannot open potential file: " + spec);
    auto sections = parse_sections(file);
    auto it = sections.find("potential");
    if (it == sections.end())
        throw std::invalid_argument("no [potential] section in " + spec);
    return potential_from_section(it->second);
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw std::invalid_argument("cannot open config file: " + path);
    auto sections = parse_sections(file);

    RunConfig cfg;
    if (auto it = sections.find("potential"); it != sections.end()) {
        cfg.potential = potential_from_section(it->second);
        cfg.potential_spec = path;
    }
    if (auto it = sections.find("grid"); it != sections.end()) {
        for (const auto& [key, value] : it->second.items) {
            if (key == "beta") cfg.beta_grid = parse_double_list(value);
            else if (key == "kmax") cfg.K = std::stoi(value);
            else if (key == "order") cfg.N = std::stoi(value);
            else throw std::invalid_argument("unknown [grid] key: " + key);
        }
    }
    if (auto it = sections.find("sampler"); it != sections.end()) {
        for (const auto& [key, value] : it->second.items) {
            if (key == "samples") cfg.samples = std::stol(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "method") cfg.method = value;
            else if (key == "quad_nodes") cfg.quad_nodes = std::stoi(value);
            else if (key == "quad_tol") cfg.quad_tol = std::stod(value);
            else if (key == "oracle_step") cfg.oracle_step = std::stod(value);
            else throw std::invalid_argument("unknown [sampler] key: " + key);
        }
    }
    if (auto it = sections.find("output"); it != sections.end()) {
        for (const auto& [key, value] : it->second.items) {
            if (key == "dir") cfg.out_dir = value;
            else if (key == "format") cfg.format = value;
            else throw std::invalid_argument("unknown [output] key: " + key);
        }
    }
    return cfg;
}

void RunConfig::validate() const {
    if (beta_grid.empty())
        throw std::invalid_argument("beta grid must not be empty");
    for (double b : beta_grid) {
        if (!(b > 0.0))
            throw std::invalid_argument("beta values must be positive");
    }
    if (N > 0 && K < N)
        throw std::invalid_argument(
            "series order cannot exceed the available cluster size (K >= N)");
    if ((method == "monte_carlo" || method == "both") && !seed.has_value())
        throw std::invalid_argument(
            "Monte Carlo runs require an explicit seed (reproducibility)");
    if (method != "quadrature" && method != "monte_carlo" && method != "both")
        throw std::invalid_argument("unknown sampler method: " + method);
    if (format != "csv" && format != "json")
        throw std::invalid_argument("format must be csv or json");
}

}  // namespace cluvir
