#pragma once

// JSON/CSV serialization for specs, reports, tables, and certificates.
// Field names are part of the stable output contract; CSV follows RFC 4180.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "coupling_forge/coupling.hpp"
#include "coupling_forge/pivot.hpp"
#include "coupling_forge/processes.hpp"
#include "coupling_forge/row_classes.hpp"
#include "coupling_forge/structures.hpp"

namespace coupling_forge {

inline nlohmann::json bigint_to_json(const BigInt& v) {
    if (v >= 0 && v <= BigInt(std::numeric_limits<std::uint64_t>::max()))
        return v.convert_to<std::uint64_t>();
    return v.str();
}

inline BigInt bigint_from_json(const nlohmann::json& j) {
    if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
    if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
    if (j.is_string()) return BigInt(j.get<std::string>());
    throw std::invalid_argument("expected integer or decimal string");
}

inline nlohmann::json spec_to_json(const StructureSpec& spec) {
    nlohmann::json j;
    j["kind"] = std::string(kind_name(spec.kind));
    j["n"] = spec.n;
    nlohmann::json m = nlohmann::json::array();
    for (int i = 0; i < spec.n; ++i) m.push_back(bigint_to_json(spec.m[i]));
    j["m"] = m;
    return j;
}

/// Accepts either {"preset": name, "n": n} or {"kind": ..., "n": ..., "m": [...]}.
inline StructureSpec spec_from_json(const nlohmann::json& j) {
    if (j.contains("preset"))
        return StructureSpec::preset(j.at("preset").get<std::string>(), j.at("n").get<int>());
    StructureSpec spec;
    spec.kind = kind_from_name(j.at("kind").get<std::string>());
    spec.n = j.at("n").get<int>();
    for (const nlohmann::json& mi : j.at("m")) spec.m.push_back(bigint_from_json(mi));
    spec.validate();
    if (static_cast<int>(spec.m.size()) > spec.n) spec.m.resize(spec.n);
    return spec;
}

inline nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline StructureSpec load_spec_file(const std::string& path) {
    return spec_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------
// Reports

inline nlohmann::json to_json(const ConditioningReport& rep) {
    nlohmann::json j;
    j["passed"] = rep.passed;
    j["tol"] = rep.tol;
    j["max_residual"] = rep.max_residual;
    j["worst_label"] = rep.worst_label;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [label, residual] : rep.residuals)
        rows.push_back({{"label", label}, {"residual", residual}});
    j["residuals"] = rows;
    return j;
}

inline nlohmann::json to_json(const PivotMassReport& rep) {
    nlohmann::json j;
    j["x"] = rep.x;
    j["max_mass"] = rep.max_mass;
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& [label, mass] : rep.per_column)
        cols.push_back({{"label", label.a},
                        {"multiplicity", bigint_to_json(label.multiplicity)},
                        {"pivot_mass", mass}});
    j["columns"] = cols;
    return j;
}

inline nlohmann::json to_json(const ThresholdResult& res) {
    nlohmann::json j;
    j["x"] = res.x;
    j["max_mass"] = res.max_mass;
    j["target"] = res.target;
    nlohmann::json probes = nlohmann::json::array();
    for (const ThresholdProbe& p : res.probes)
        probes.push_back({{"x", p.x}, {"max_mass", p.max_mass}});
    j["probes"] = probes;
    return j;
}

inline nlohmann::json to_json(const VerificationReport& rep) {
    return {{"passed", rep.passed},
            {"tol", rep.tol},
            {"pivot_violations", rep.pivot_violations},
            {"first_violation", rep.first_violation},
            {"max_row_residual", rep.max_row_residual},
            {"max_col_residual", rep.max_col_residual},
            {"total_mass", rep.total_mass},
            {"total_mass_error", rep.total_mass_error}};
}

inline nlohmann::json to_json(const StrassenWitness& w) {
    nlohmann::json j;
    j["satisfied"] = w.satisfied;
    j["max_mass"] = w.max_mass;
    j["threshold"] = w.threshold;
    j["en_present"] = w.en_present;
    if (w.attaining) j["attaining_label"] = w.attaining->a;
    return j;
}

// ---------------------------------------------------------------------------
// Coupling artifacts

inline constexpr const char* kTableFormatTag = "coupling-forge/table/v1";
inline constexpr const char* kCertificateFormatTag = "coupling-forge/certificate/v1";

inline nlohmann::json table_to_json(const CouplingTable& table) {
    const ProcessFamily fam(table.spec, table.x);
    const RowClassSet classes(fam, 10'000'000);
    nlohmann::json j = spec_to_json(table.spec);
    j["format"] = kTableFormatTag;
    j["x"] = table.x;
    j["flow_value"] = table.flow_value;
    nlohmann::json entries = nlohmann::json::array();
    std::vector<int> v;
    for (const CouplingEntry& e : table.entries) {
        classes.decode(e.class_index, v);
        entries.push_back({v, table.labels[e.label_index].a, e.mass});
    }
    j["entries"] = entries;
    return j;
}

inline CouplingTable table_from_json(const nlohmann::json& j) {
    if (!j.contains("format") || j.at("format") != kTableFormatTag)
        throw std::invalid_argument("not a coupling table file");
    CouplingTable table;
    table.spec = spec_from_json(j);
    table.x = j.at("x").get<double>();
    table.flow_value = j.value("flow_value", 0.0);
    table.labels = enumerate_column_labels(table.spec);
    const ProcessFamily fam(table.spec, table.x);
    const RowClassSet classes(fam, 10'000'000);

    std::map<std::vector<int>, int> label_index;
    for (std::size_t i = 0; i < table.labels.size(); ++i)
        label_index[table.labels[i].a] = static_cast<int>(i);

    for (const nlohmann::json& ent : j.at("entries")) {
        if (!ent.is_array() || ent.size() != 3)
            throw std::invalid_argument("table entry must be [class, label, mass]");
        const std::vector<int> v = ent[0].get<std::vector<int>>();
        const std::vector<int> a = ent[1].get<std::vector<int>>();
        const auto it = label_index.find(a);
        if (it == label_index.end())
            throw std::invalid_argument("table entry references unknown label " +
                                        label_to_string(a));
        table.entries.push_back(
            {classes.index_of(v), it->second, ent[2].get<double>()});
    }
    std::sort(table.entries.begin(), table.entries.end(),
              [](const CouplingEntry& a, const CouplingEntry& b) {
                  if (a.label_index != b.label_index) return a.label_index < b.label_index;
                  return a.class_index < b.class_index;
              });
    return table;
}

inline CouplingTable load_table_file(const std::string& path) {
    return table_from_json(read_json_file(path));
}

inline nlohmann::json to_json(const CutCertificate& cert) {
    nlohmann::json j = spec_to_json(cert.spec);
    j["format"] = kCertificateFormatTag;
    j["x"] = cert.x;
    j["flow_value"] = cert.flow_value;
    nlohmann::json labels = nlohmann::json::array();
    for (const ColumnLabel& lab : cert.labels) labels.push_back(lab.a);
    j["labels"] = labels;
    j["nu_L"] = cert.nu_L;
    j["mu_reachable"] = cert.mu_reachable;
    j["gap"] = cert.gap();
    return j;
}

// ---------------------------------------------------------------------------
// Hashing (cache keys)

inline std::string spec_hash(const StructureSpec& spec, double x) {
    std::string canon = std::string(kind_name(spec.kind)) + "|" + std::to_string(spec.n) + "|";
    for (int i = 0; i < spec.n; ++i) {
        canon += spec.m[i].str();
        canon += ',';
    }
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(x));
    std::memcpy(&bits, &x, sizeof(bits));
    char buf[20];
    std::snprintf(buf, sizeof(buf), "|%016llx", static_cast<unsigned long long>(bits));
    canon += buf;

    std::uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// CSV

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

inline std::string csv_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_label(std::span<const int> a) {
    std::string s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i) s += ',';
        s += std::to_string(a[i]);
    }
    return csv_escape(s);
}

inline std::string labels_to_csv(const std::vector<std::pair<ColumnLabel, double>>& dist) {
    std::string out = "label,multiplicity,probability\r\n";
    for (const auto& [label, prob] : dist) {
        out += csv_label(label.a) + "," + label.multiplicity.str() + "," + csv_double(prob) +
               "\r\n";
    }
    return out;
}

inline std::string pivot_report_to_csv(const PivotMassReport& rep) {
    std::string out = "label,multiplicity,pivot_mass\r\n";
    for (const auto& [label, mass] : rep.per_column)
        out += csv_label(label.a) + "," + label.multiplicity.str() + "," + csv_double(mass) +
               "\r\n";
    return out;
}

inline std::string pivot_sweep_to_csv(const std::vector<PivotMassReport>& reports) {
    std::string out = "x,label,multiplicity,pivot_mass\r\n";
    for (const PivotMassReport& rep : reports)
        for (const auto& [label, mass] : rep.per_column)
            out += csv_double(rep.x) + "," + csv_label(label.a) + "," +
                   label.multiplicity.str() + "," + csv_double(mass) + "\r\n";
    return out;
}

}  // namespace coupling_forge
