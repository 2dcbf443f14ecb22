#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "reclab/experiments.hpp"
#include "reclab/types.hpp"

namespace reclab {

ojson num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::size_t ReportTable::add(std::vector<ojson> row) {
    if (row.size() != columns.size())
        throw std::logic_error("table '" + name + "': row width does not match the columns");
    rows.push_back(std::move(row));
    return rows.size() - 1;
}

namespace {

std::string csv_cell(const ojson& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string quoted = "\"";
        for (char c : s) {
            if (c == '"') quoted += '"';
            quoted += c;
        }
        return quoted + "\"";
    }
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    return v.dump();
}

}  // namespace

std::string ReportTable::csv() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv_cell(row[i]);
        out << '\n';
    }
    return out.str();
}

ReportTable& Report::table(const std::string& name, std::vector<std::string> columns) {
    for (auto& t : tables)
        if (t.name == name) return t;
    tables.push_back({name, std::move(columns), {}});
    return tables.back();
}

const ReportTable& Report::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return t;
    throw std::out_of_range("report has no table '" + name + "'");
}

void Report::verdict(std::string claim, bool ok, const std::string& table_name,
                     std::vector<std::size_t> rows, std::string detail) {
    verdicts.push_back({std::move(claim), ok, table_name, std::move(rows), std::move(detail)});
}

bool Report::passed() const {
    for (const auto& v : verdicts)
        if (!v.passed) return false;
    return true;
}

ojson Report::to_json() const {
    ojson doc;
    doc["experiment"] = id;
    doc["passed"] = passed();
    doc["parameters"] = parameters;
    doc["provenance"] = provenance;
    ojson vs = ojson::array();
    for (const auto& v : verdicts) {
        ojson j;
        j["claim"] = v.claim;
        j["passed"] = v.passed;
        j["table"] = v.table;
        j["rows"] = v.rows;
        j["detail"] = v.detail;
        vs.push_back(std::move(j));
    }
    doc["verdicts"] = std::move(vs);
    ojson ts = ojson::array();
    for (const auto& t : tables) {
        ojson j;
        j["name"] = t.name;
        j["columns"] = t.columns;
        ojson rows = ojson::array();
        for (const auto& r : t.rows) rows.push_back(ojson(r));
        j["rows"] = std::move(rows);
        ts.push_back(std::move(j));
    }
    doc["tables"] = std::move(ts);
    return doc;
}

Report Report::from_json(const ojson& doc) {
    try {
        Report r(doc.at("experiment").get<std::string>());
        r.parameters = doc.at("parameters");
        r.provenance = doc.at("provenance");
        for (const auto& t : doc.at("tables")) {
            ReportTable table{t.at("name").get<std::string>(), t.at("columns").get<std::vector<std::string>>(), {}};
            for (const auto& row : t.at("rows")) table.add(row.get<std::vector<ojson>>());
            r.tables.push_back(std::move(table));
        }
        for (const auto& v : doc.at("verdicts"))
            r.verdicts.push_back({v.at("claim").get<std::string>(), v.at("passed").get<bool>(),
                                  v.at("table").get<std::string>(),
                                  v.at("rows").get<std::vector<std::size_t>>(),
                                  v.value("detail", std::string{})});
        return r;
    } catch (const ojson::exception& e) {
        throw ConfigError(std::string("report document: ") + e.what());
    } catch (const std::logic_error& e) {
        throw ConfigError(std::string("report document: ") + e.what());
    }
}

std::string Report::summary() const {
    std::ostringstream out;
    out << id << ": " << (passed() ? "PASS" : "FAIL") << '\n';
    for (const auto& v : verdicts) {
        out << "  [" << (v.passed ? "pass" : "FAIL") << "] " << v.claim;
        if (!v.detail.empty()) out << " (" << v.detail << ")";
        out << '\n';
    }
    return out.str();
}

void Report::write(const std::filesystem::path& dir, bool with_tables) const {
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / (id + ".json"), std::ios::binary);
        if (!out) throw ConfigError("cannot write to " + dir.string());
        out << to_json().dump(2) << '\n';
    }
    if (!with_tables) return;
    for (const auto& t : tables) {
        std::ofstream out(dir / (id + "_" + t.name + ".csv"), std::ios::binary);
        if (!out) throw ConfigError("cannot write to " + dir.string());
        out << t.csv();
    }
}

ojson merge_parameters(const ojson& defaults, const nlohmann::json& overrides,
                       const std::string& context) {
    if (!overrides.is_object()) throw ConfigError(context + ": parameter overrides must be an object");
    ojson out = defaults;
    for (const auto& [key, value] : overrides.items()) {
        if (!defaults.contains(key)) throw ConfigError(context + ": unknown parameter '" + key + "'");
        const ojson& base = defaults.at(key);
        const std::string where = context + "." + key;
        if (base.is_object()) {
            out[key] = merge_parameters(base, value, where);
        } else if (base.is_number()) {
            if (!value.is_number()) throw ConfigError(where + ": expected a number");
            out[key] = ojson::parse(value.dump());
        } else if (base.type() != ojson::parse(value.dump()).type()) {
            throw ConfigError(where + ": type differs from the default");
        } else {
            out[key] = ojson::parse(value.dump());
        }
    }
    return out;
}

const ExperimentEntry& find_experiment(const std::string& name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

Report run_experiment(const std::string& name, const nlohmann::json& overrides, const RunContext& ctx) {
    const auto& entry = find_experiment(name);
    Report r = entry.run(merge_parameters(entry.defaults, overrides, name), ctx);
    r.provenance["overrides"] = ojson::parse(overrides.dump());
    return r;
}

}  // namespace reclab
