#include "sbrp/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbrp/errors.hpp"

namespace sbrp {

using nlohmann::json;

namespace {

constexpr double kEarthRadiusM = 6371000.0;
constexpr double kBpsSpeedMPerS = 8.9408;  // 20 mph flat speed for point data
constexpr double kPi = 3.14159265358979323846;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string stem_of(const std::string& path) {
    std::size_t slash = path.find_last_of("/\\");
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.find_last_of('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

double json_or_inf(const json& j) {
    if (j.is_null()) return kInfinity;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return kInfinity;
        throw ParseError("expected number or \"inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

json inf_or_json(double v) {
    if (std::isinf(v)) return nullptr;
    return v;
}

void sort_instance(Instance& ins) {
    std::sort(ins.network.nodes.begin(), ins.network.nodes.end(),
              [](const RoadNode& a, const RoadNode& b) { return a.id < b.id; });
    std::sort(ins.students.begin(), ins.students.end(),
              [](const Student& a, const Student& b) { return a.id < b.id; });
    std::sort(ins.candidate_stops.begin(), ins.candidate_stops.end());
}

Instance load_native_json(const std::string& path) {
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return instance_from_json(j.dump());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// bps-csv: comma-separated rows  kind,id,lat,lon,max_walk_m,d2d
// with kind in {school, depot, stop, student}. Lat/lon are projected to
// local planar meters; times use a flat speed (no road data in this form).
Instance load_bps_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");

    struct Row {
        std::string kind;
        NodeId id;
        double lat, lon;
        double walk;
        bool d2d;
    };
    std::vector<Row> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (lineno == 1 && line.rfind("kind,", 0) == 0) continue;  // header
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        while (f.size() < 6) f.push_back("");
        const std::string ctx = path + ":" + std::to_string(lineno);
        try {
            Row r;
            r.kind = f[0];
            r.id = std::stoi(f[1]);
            r.lat = std::stod(f[2]);
            r.lon = std::stod(f[3]);
            r.walk = f[4].empty() ? 0.0 : std::stod(f[4]);
            r.d2d = !f[5].empty() && (f[5] == "1" || f[5] == "true");
            if (r.kind != "school" && r.kind != "depot" && r.kind != "stop" &&
                r.kind != "student")
                throw ParseError(ctx + ": unknown kind '" + r.kind + "'");
            rows.push_back(r);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception&) {
            throw ParseError(ctx + ": malformed row '" + line + "'");
        }
    }
    if (rows.empty()) throw ParseError(path + ": no rows");

    double lat0 = 0.0;
    for (const Row& r : rows) lat0 += r.lat;
    lat0 /= static_cast<double>(rows.size());
    const double mx = kEarthRadiusM * std::cos(lat0 * kPi / 180.0) * kPi / 180.0;
    const double my = kEarthRadiusM * kPi / 180.0;

    Instance ins;
    ins.name = stem_of(path);
    ins.speed_m_s = kBpsSpeedMPerS;
    ins.cost.alt_modes = {{"dedicated", 2.0}};
    bool saw_school = false, saw_depot = false;
    for (const Row& r : rows) {
        ins.network.nodes.push_back({r.id, r.lon * mx, r.lat * my});
        if (r.kind == "school") {
            ins.school = r.id;
            saw_school = true;
        } else if (r.kind == "depot") {
            ins.depot = r.id;
            saw_depot = true;
        } else if (r.kind == "stop") {
            ins.candidate_stops.push_back(r.id);
        } else {
            Student s;
            s.id = r.id;
            s.home = r.id;
            s.max_walk_m = r.d2d ? 0.0 : r.walk;
            s.door_to_door = s.max_walk_m == 0.0;
            ins.students.push_back(s);
        }
    }
    if (!saw_school) throw ParseError(path + ": no school row");
    if (!saw_depot) ins.depot = ins.school;
    sort_instance(ins);
    validate(ins);
    return ins;
}

// euclidean text form: whitespace-separated tokens
//   <num_stops> <num_students> <capacity> <max_walk>
// followed by num_stops+1 coordinate pairs (the first is the school),
// then num_students coordinate pairs. Unit speed, no stop delays, no time
// limit, distance-only cost.
Instance load_euclidean(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    long n_stops = 0, n_students = 0, capacity = 0;
    double max_walk = 0.0;
    if (!(in >> n_stops >> n_students >> capacity >> max_walk))
        throw ParseError(path + ": malformed header (want: stops students capacity walk)");
    if (n_stops < 1 || n_students < 1 || capacity < 1)
        throw ParseError(path + ": header counts must be positive");

    Instance ins;
    ins.name = stem_of(path);
    ins.capacity = static_cast<int>(capacity);
    ins.t_max_s = kInfinity;
    ins.stop_delay = {0.0, 0.0};
    ins.speed_m_s = 1.0;
    ins.cost_unit_m = 1.0;
    ins.cost.bus_fixed = 0.0;
    ins.cost.bus_per_mile = 1.0;
    ins.cost.alt_modes.clear();

    NodeId next_id = 0;
    auto read_point = [&](const char* what, long k) {
        double x, y;
        if (!(in >> x >> y))
            throw ParseError(path + ": truncated while reading " + std::string(what) + " " +
                             std::to_string(k));
        ins.network.nodes.push_back({next_id, x, y});
        return next_id++;
    };

    ins.school = read_point("school", 0);
    ins.depot = ins.school;
    for (long k = 0; k < n_stops; ++k) ins.candidate_stops.push_back(read_point("stop", k + 1));
    for (long k = 0; k < n_students; ++k) {
        Student s;
        s.id = static_cast<StudentId>(k);
        s.home = read_point("student", k);
        s.max_walk_m = max_walk;
        s.door_to_door = max_walk == 0.0;
        ins.students.push_back(s);
    }
    validate(ins);
    return ins;
}

}  // namespace

InstanceFormat guess_format(const std::string& path) {
    auto ends_with = [&](const char* suffix) {
        const std::string s(suffix);
        return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
    };
    if (ends_with(".json")) return InstanceFormat::kNativeJson;
    if (ends_with(".csv")) return InstanceFormat::kBpsCsv;
    return InstanceFormat::kEuclideanSchittekat;
}

Instance load_instance(const std::string& path, InstanceFormat format) {
    switch (format) {
        case InstanceFormat::kNativeJson: return load_native_json(path);
        case InstanceFormat::kBpsCsv: return load_bps_csv(path);
        case InstanceFormat::kEuclideanSchittekat: return load_euclidean(path);
    }
    throw ParseError("unknown instance format");
}

Instance load_instance(const std::string& path) {
    return load_instance(path, guess_format(path));
}

std::string instance_to_json(const Instance& ins) {
    json j;
    j["name"] = ins.name;
    if (ins.network.euclidean()) {
        json pts = json::array();
        for (const RoadNode& n : ins.network.nodes)
            pts.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
        j["points"] = pts;
    } else {
        json nodes = json::array(), edges = json::array();
        for (const RoadNode& n : ins.network.nodes)
            nodes.push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
        for (const RoadEdge& e : ins.network.edges)
            edges.push_back({{"from", e.from}, {"to", e.to},
                             {"length_m", e.length_m}, {"time_s", e.time_s}});
        j["network"] = {{"nodes", nodes}, {"edges", edges}};
    }
    json studs = json::array();
    for (const Student& s : ins.students)
        studs.push_back({{"id", s.id}, {"home", s.home},
                         {"max_walk_m", s.max_walk_m}, {"door_to_door", s.door_to_door}});
    j["students"] = studs;
    j["stops"] = ins.candidate_stops;
    j["school"] = ins.school;
    j["depot"] = ins.depot;
    j["params"] = {
        {"capacity", ins.capacity},
        {"t_max_s", inf_or_json(ins.t_max_s)},
        {"fleet_limit", ins.fleet_limit == Instance::kUnlimitedFleet
                            ? json(nullptr) : json(ins.fleet_limit)},
        {"stop_delay", {ins.stop_delay.base_s, ins.stop_delay.per_student_s}},
        {"speed_m_s", ins.speed_m_s},
        {"cost_unit_m", ins.cost_unit_m},
    };
    json alts = json::array();
    for (const AlternateMode& a : ins.cost.alt_modes)
        alts.push_back({{"mode", a.mode}, {"per_mile", inf_or_json(a.per_mile)}});
    j["costs"] = {{"bus_fixed", ins.cost.bus_fixed},
                  {"bus_per_mile", ins.cost.bus_per_mile},
                  {"alt_modes", alts}};
    return j.dump(2) + "\n";
}

Instance instance_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("native-json: ") + e.what());
    }
    try {
        Instance ins;
        ins.name = j.value("name", "");
        if (j.contains("points") == j.contains("network"))
            throw ParseError("native-json: exactly one of 'points'/'network' is required");
        if (j.contains("points")) {
            for (const json& p : j.at("points"))
                ins.network.nodes.push_back(
                    {p.at("id").get<NodeId>(), p.at("x").get<double>(), p.at("y").get<double>()});
        } else {
            const json& net = j.at("network");
            for (const json& p : net.at("nodes"))
                ins.network.nodes.push_back(
                    {p.at("id").get<NodeId>(), p.at("x").get<double>(), p.at("y").get<double>()});
            for (const json& e : net.at("edges"))
                ins.network.edges.push_back({e.at("from").get<NodeId>(), e.at("to").get<NodeId>(),
                                             e.at("length_m").get<double>(),
                                             e.at("time_s").get<double>()});
        }
        for (const json& s : j.at("students")) {
            Student st;
            st.id = s.at("id").get<StudentId>();
            st.home = s.at("home").get<NodeId>();
            st.max_walk_m = s.value("max_walk_m", 0.0);
            st.door_to_door = s.value("door_to_door", st.max_walk_m == 0.0);
            ins.students.push_back(st);
        }
        ins.candidate_stops = j.at("stops").get<std::vector<NodeId>>();
        ins.school = j.at("school").get<NodeId>();
        ins.depot = j.at("depot").get<NodeId>();
        if (j.contains("params")) {
            const json& p = j.at("params");
            ins.capacity = p.value("capacity", ins.capacity);
            if (p.contains("t_max_s")) ins.t_max_s = json_or_inf(p.at("t_max_s"));
            if (p.contains("fleet_limit") && !p.at("fleet_limit").is_null())
                ins.fleet_limit = p.at("fleet_limit").get<int>();
            if (p.contains("stop_delay")) {
                const json& d = p.at("stop_delay");
                ins.stop_delay = {d.at(0).get<double>(), d.at(1).get<double>()};
            }
            ins.speed_m_s = p.value("speed_m_s", ins.speed_m_s);
            ins.cost_unit_m = p.value("cost_unit_m", ins.cost_unit_m);
        }
        if (j.contains("costs")) {
            const json& c = j.at("costs");
            ins.cost.bus_fixed = c.value("bus_fixed", ins.cost.bus_fixed);
            ins.cost.bus_per_mile = c.value("bus_per_mile", ins.cost.bus_per_mile);
            ins.cost.alt_modes.clear();
            if (c.contains("alt_modes"))
                for (const json& a : c.at("alt_modes"))
                    ins.cost.alt_modes.push_back(
                        {a.at("mode").get<std::string>(), json_or_inf(a.at("per_mile"))});
        }
        sort_instance(ins);
        validate(ins);
        return ins;
    } catch (const json::exception& e) {
        throw ParseError(std::string("native-json: ") + e.what());
    }
}

void save_instance(const Instance& instance, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << instance_to_json(instance);
}

}  // namespace sbrp
