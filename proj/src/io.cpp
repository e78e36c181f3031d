#include "cqed/io.hpp"

#include "cqed/errors.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace cqed {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

const std::vector<double>& CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return columns[i];
    throw InvalidArgument("CSV has no column '" + std::string(name) + "'");
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    if (table.header.size() != table.columns.size()) throw InvalidArgument("CSV header and columns differ in count");
    const std::size_t rows = table.columns.empty() ? 0 : table.columns.front().size();
    for (const auto& c : table.columns)
        if (c.size() != rows) throw InvalidArgument("CSV columns differ in length");
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << format_double(table.columns[j][i]);
        out << '\n';
    }
    if (!out) throw InvalidArgument("failed writing " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument(path.string() + ": empty file");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    t.columns.assign(t.header.size(), {});
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        std::size_t col = 0, start = 0;
        while (start <= line.size()) {
            const std::size_t stop = std::min(line.find(',', start), line.size());
            if (col >= t.header.size()) throw InvalidArgument(path.string() + ": ragged row " + std::to_string(row));
            double v = 0.0;
            const auto [p, ec] = std::from_chars(line.data() + start, line.data() + stop, v);
            if (ec != std::errc() || p != line.data() + stop)
                throw InvalidArgument(path.string() + ": bad number in row " + std::to_string(row));
            t.columns[col++].push_back(v);
            start = stop + 1;
        }
        if (col != t.header.size()) throw InvalidArgument(path.string() + ": ragged row " + std::to_string(row));
    }
    return t;
}

namespace {

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
    if (!j.is_object()) throw InvalidArgument(std::string(what) + " must be an object");
    for (const auto& [k, v] : j.items())
        if (!known.count(k)) throw InvalidArgument(std::string(what) + ": unknown key '" + k + "'");
}

}  // namespace

json to_json(const SystemParams& p) {
    return {{"g", p.g},         {"kappa", p.kappa},       {"gamma", p.gamma}, {"gamma_s", p.gamma_s},
            {"eps_d", p.eps_d}, {"focusing", p.focusing}, {"eta", p.eta},     {"theta", p.theta}};
}

SystemParams params_from_json(const json& j) {
    reject_unknown(j, {"g", "kappa", "gamma", "gamma_s", "eps_d", "focusing", "eta", "theta"}, "params");
    SystemParams p;
    p.g = j.value("g", p.g);
    p.kappa = j.value("kappa", p.kappa);
    p.gamma = j.value("gamma", p.gamma);
    p.gamma_s = j.value("gamma_s", p.gamma_s);
    p.eps_d = j.value("eps_d", p.eps_d);
    p.focusing = j.value("focusing", p.focusing);
    p.eta = j.value("eta", p.eta);
    p.theta = j.value("theta", p.theta);
    return p;
}

json to_json(const TrajectoryConfig& c) {
    json init = {{"fock", c.initial.fock}, {"s1", c.initial.s1}, {"s2", c.initial.s2}};
    if (c.initial.coherent) init["coherent"] = {c.initial.coherent->real(), c.initial.coherent->imag()};
    json j = {{"params", to_json(c.params)},
              {"n_fock", c.n_fock},
              {"scheme", std::string(to_string(c.scheme))},
              {"seed", c.seed},
              {"t_end", c.t_end},
              {"sample_dt", c.sample_dt},
              {"initial", init},
              {"observables", c.observables},
              {"tolerance", c.tolerance},
              {"norm_tolerance", c.norm_tolerance},
              {"max_refinement", c.max_refinement},
              {"truncation_tol", c.truncation_tol}};
    if (c.field_average_from) j["field_average_from"] = *c.field_average_from;
    return j;
}

TrajectoryConfig trajectory_config_from_json(const json& j) {
    reject_unknown(j,
                   {"params", "n_fock", "scheme", "seed", "t_end", "sample_dt", "initial", "observables", "tolerance",
                    "norm_tolerance", "max_refinement", "truncation_tol", "field_average_from"},
                   "trajectory config");
    TrajectoryConfig c;
    try {
        if (j.contains("params")) c.params = params_from_json(j.at("params"));
        c.n_fock = j.value("n_fock", c.n_fock);
        if (j.contains("scheme")) c.scheme = parse_scheme(j.at("scheme").get<std::string>());
        c.seed = j.value("seed", c.seed);
        c.t_end = j.value("t_end", c.t_end);
        c.sample_dt = j.value("sample_dt", c.sample_dt);
        if (j.contains("initial")) {
            const json& i = j.at("initial");
            reject_unknown(i, {"fock", "s1", "s2", "coherent"}, "initial state");
            c.initial.fock = i.value("fock", c.initial.fock);
            c.initial.s1 = i.value("s1", c.initial.s1);
            c.initial.s2 = i.value("s2", c.initial.s2);
            if (i.contains("coherent")) c.initial.coherent = cplx(i.at("coherent").at(0), i.at("coherent").at(1));
        }
        if (j.contains("observables")) c.observables = j.at("observables").get<std::vector<std::string>>();
        c.tolerance = j.value("tolerance", c.tolerance);
        c.norm_tolerance = j.value("norm_tolerance", c.norm_tolerance);
        c.max_refinement = j.value("max_refinement", c.max_refinement);
        c.truncation_tol = j.value("truncation_tol", c.truncation_tol);
        if (j.contains("field_average_from")) c.field_average_from = j.at("field_average_from").get<double>();
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("trajectory config: ") + e.what());
    }
    return c;
}

std::filesystem::path sidecar_path(const std::filesystem::path& csv) {
    std::filesystem::path p = csv;
    return p.replace_extension(".json");
}

void write_record(const std::filesystem::path& csv, const TrajectoryRecord& rec) {
    CsvTable t;
    t.header.push_back("t");
    t.columns.push_back(rec.time);
    for (std::size_t i = 0; i < rec.columns.size(); ++i) {
        t.header.push_back(rec.columns[i]);
        t.columns.push_back(rec.data[i]);
    }
    write_csv(csv, t);

    json events = json::array();
    for (const JumpEvent& e : rec.events) events.push_back({e.time, e.channel});
    const json side = {{"config", to_json(rec.config)},
                       {"events", events},
                       {"accepted_steps", rec.accepted_steps},
                       {"rejected_steps", rec.rejected_steps},
                       {"max_norm_drift", rec.max_norm_drift},
                       {"max_renorm_error", rec.max_renorm_error},
                       {"max_hermitian_imag", rec.max_hermitian_imag}};
    std::ofstream out(sidecar_path(csv));
    out << side.dump(2) << '\n';
    if (!out) throw InvalidArgument("failed writing " + sidecar_path(csv).string());
}

TrajectoryRecord read_record(const std::filesystem::path& csv) {
    const CsvTable t = read_csv(csv);
    if (t.header.empty() || t.header.front() != "t") throw InvalidArgument(csv.string() + ": first column must be t");
    std::ifstream in(sidecar_path(csv));
    if (!in) throw InvalidArgument("missing sidecar " + sidecar_path(csv).string());
    json side;
    try {
        side = json::parse(in);
    } catch (const json::exception& e) {
        throw InvalidArgument(sidecar_path(csv).string() + ": " + e.what());
    }
    TrajectoryRecord rec;
    rec.config = trajectory_config_from_json(side.at("config"));
    rec.time = t.columns.front();
    rec.columns.assign(t.header.begin() + 1, t.header.end());
    rec.data.assign(t.columns.begin() + 1, t.columns.end());
    for (const json& e : side.value("events", json::array())) rec.events.push_back({e.at(0), e.at(1)});
    rec.accepted_steps = side.value("accepted_steps", 0L);
    rec.rejected_steps = side.value("rejected_steps", 0L);
    rec.max_norm_drift = side.value("max_norm_drift", 0.0);
    rec.max_renorm_error = side.value("max_renorm_error", 0.0);
    rec.max_hermitian_imag = side.value("max_hermitian_imag", 0.0);
    return rec;
}

}  // namespace cqed
