#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sbrp/errors.hpp"
#include "sbrp/pipeline.hpp"

namespace sbrp {

using nlohmann::json;

namespace {

json optional_to_json(const std::optional<double>& v) {
    if (!v) return nullptr;
    return *v;
}

std::optional<double> optional_from_json(const json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<double>();
}

}  // namespace

EmitFormat parse_emit_format(const std::string& name) {
    if (name == "json") return EmitFormat::kJson;
    if (name == "geojson") return EmitFormat::kGeoJson;
    if (name == "svg") return EmitFormat::kSvg;
    if (name == "table" || name == "text" || name == "text-table") return EmitFormat::kTextTable;
    throw ValidationError("unknown emit format '" + name +
                          "' (want table, json, geojson or svg)");
}

std::string solution_to_json(const Solution& sol) {
    json j;
    j["total_cost"] = sol.total_cost;
    j["bus_count"] = sol.bus_count;
    j["students_alt"] = sol.students_alt;

    json routes = json::array();
    for (const BusRoute& r : sol.bus_routes) {
        json route;
        route["stops"] = r.trip.route;
        route["node_set"] = r.trip.node_set;
        route["time_s"] = r.trip.travel_time_s;
        route["dist_m"] = r.trip.distance_m;
        route["students"] = r.trip.students;
        json manifest = json::array();
        for (const ManifestEntry& m : r.manifest)
            manifest.push_back(
                {{"stop", m.stop}, {"location", m.location}, {"students", m.students}});
        route["manifest"] = manifest;
        routes.push_back(route);
    }
    j["bus_routes"] = routes;

    json alts = json::array();
    for (const auto& [student, mode] : sol.alt_assignments)
        alts.push_back({{"student", student}, {"mode", mode}});
    j["alt_assignments"] = alts;

    const Diagnostics& d = sol.diagnostics;
    j["diagnostics"] = {
        {"instance", d.instance},
        {"students", d.students},
        {"door_to_door", d.door_to_door},
        {"stops", d.stops},
        {"bus_trips", d.bus_trips},
        {"beta", optional_to_json(d.beta)},
        {"gamma", optional_to_json(d.gamma)},
        {"solver_status", d.solver_status},
        {"cover_objective", d.cover_objective},
        {"lower_bound", d.lower_bound},
        {"gap", d.gap},
    };
    return j.dump(2) + "\n";
}

Solution solution_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("solution json: ") + e.what());
    }
    try {
        Solution sol;
        sol.total_cost = j.at("total_cost").get<double>();
        sol.bus_count = j.at("bus_count").get<int>();
        sol.students_alt = j.at("students_alt").get<int>();
        for (const json& route : j.at("bus_routes")) {
            BusRoute r;
            r.trip.route = route.at("stops").get<std::vector<std::int32_t>>();
            r.trip.node_set = route.at("node_set").get<std::vector<std::int32_t>>();
            r.trip.travel_time_s = route.at("time_s").get<double>();
            r.trip.distance_m = route.at("dist_m").get<double>();
            r.trip.students = route.at("students").get<int>();
            for (const json& m : route.at("manifest")) {
                ManifestEntry e;
                e.stop = m.at("stop").get<NodeId>();
                e.location = m.at("location").get<NodeId>();
                e.students = m.at("students").get<std::vector<StudentId>>();
                r.manifest.push_back(std::move(e));
            }
            sol.bus_routes.push_back(std::move(r));
        }
        for (const json& a : j.at("alt_assignments"))
            sol.alt_assignments.emplace_back(a.at("student").get<StudentId>(),
                                             a.at("mode").get<std::string>());
        const json& d = j.at("diagnostics");
        sol.diagnostics.instance = d.at("instance").get<std::string>();
        sol.diagnostics.students = d.at("students").get<int>();
        sol.diagnostics.door_to_door = d.at("door_to_door").get<int>();
        sol.diagnostics.stops = d.at("stops").get<int>();
        sol.diagnostics.bus_trips = d.at("bus_trips").get<std::size_t>();
        sol.diagnostics.beta = optional_from_json(d.at("beta"));
        sol.diagnostics.gamma = optional_from_json(d.at("gamma"));
        sol.diagnostics.solver_status = d.at("solver_status").get<std::string>();
        sol.diagnostics.cover_objective = d.at("cover_objective").get<double>();
        sol.diagnostics.lower_bound = d.at("lower_bound").get<double>();
        sol.diagnostics.gap = d.at("gap").get<double>();
        return sol;
    } catch (const json::exception& e) {
        throw ParseError(std::string("solution json: ") + e.what());
    }
}

std::string solution_to_text_table(const Solution& sol) {
    const Diagnostics& d = sol.diagnostics;
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-20s %8s %5s %6s %10s %6s %6s %12s %6s %5s %8s\n",
                  "instance", "students", "d2d", "stops", "bus_trips", "beta", "gamma",
                  "objective", "buses", "alt", "time_s");
    out << buf;
    char beta[16] = "-", gamma[16] = "-";
    if (d.beta) std::snprintf(beta, sizeof beta, "%.3g", *d.beta);
    if (d.gamma) std::snprintf(gamma, sizeof gamma, "%.3g", *d.gamma);
    std::snprintf(buf, sizeof buf, "%-20s %8d %5d %6d %10zu %6s %6s %12.2f %6d %5d %8.2f\n",
                  d.instance.empty() ? "-" : d.instance.c_str(), d.students, d.door_to_door,
                  d.stops, d.bus_trips, beta, gamma, sol.total_cost, sol.bus_count,
                  sol.students_alt, d.times.total_s);
    out << buf;
    return out.str();
}

namespace {

struct StopPoint {
    NodeId stop;
    NodeId location;
    int students;
};

std::vector<StopPoint> solution_stops(const Solution& sol) {
    std::map<NodeId, StopPoint> stops;
    for (const BusRoute& r : sol.bus_routes)
        for (const ManifestEntry& m : r.manifest)
            stops[m.stop] = StopPoint{m.stop, m.location, static_cast<int>(m.students.size())};
    std::vector<StopPoint> out;
    for (auto& [id, s] : stops) out.push_back(s);
    return out;
}

}  // namespace

std::string solution_to_geojson(const Solution& sol, const Instance& instance) {
    json features = json::array();

    const auto coords_of = [&](NodeId node) {
        const RoadNode& n = instance.network.at(node);
        return json::array({n.x, n.y});
    };

    int route_idx = 0;
    for (const BusRoute& r : sol.bus_routes) {
        json line = json::array();
        for (const ManifestEntry& m : r.manifest) line.push_back(coords_of(m.location));
        line.push_back(coords_of(instance.school));
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "LineString"}, {"coordinates", line}}},
                            {"properties",
                             {{"kind", "route"},
                              {"index", route_idx++},
                              {"students", r.trip.students},
                              {"time_s", r.trip.travel_time_s},
                              {"dist_m", r.trip.distance_m}}}});
    }
    for (const StopPoint& s : solution_stops(sol)) {
        features.push_back({{"type", "Feature"},
                            {"geometry", {{"type", "Point"}, {"coordinates", coords_of(s.location)}}},
                            {"properties",
                             {{"kind", "stop"}, {"stop", s.stop}, {"students", s.students}}}});
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "Point"}, {"coordinates", coords_of(instance.school)}}},
                        {"properties", {{"kind", "school"}}}});
    json alt_coords = json::array();
    for (const auto& [student, mode] : sol.alt_assignments) {
        const Student* s = instance.find_student(student);
        if (s) alt_coords.push_back(coords_of(s->home));
    }
    features.push_back({{"type", "Feature"},
                        {"geometry", {{"type", "MultiPoint"}, {"coordinates", alt_coords}}},
                        {"properties",
                         {{"kind", "alt_students"},
                          {"count", static_cast<int>(sol.alt_assignments.size())}}}});

    json j = {{"type", "FeatureCollection"}, {"features", features}};
    return j.dump(2) + "\n";
}

std::string solution_to_svg(const Solution& sol, const Instance& instance) {
    double min_x = kInfinity, max_x = -kInfinity, min_y = kInfinity, max_y = -kInfinity;
    for (const RoadNode& n : instance.network.nodes) {
        min_x = std::min(min_x, n.x);
        max_x = std::max(max_x, n.x);
        min_y = std::min(min_y, n.y);
        max_y = std::max(max_y, n.y);
    }
    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    const double size = 1000.0, margin = 40.0;
    const double scale = (size - 2 * margin) / std::max(span_x, span_y);
    const auto px = [&](double x) { return margin + (x - min_x) * scale; };
    const auto py = [&](double y) { return size - margin - (y - min_y) * scale; };

    static const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    constexpr int kPaletteSize = 10;

    std::ostringstream out;
    char buf[256];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n";
    out << "<rect width=\"1000\" height=\"1000\" fill=\"white\"/>\n";

    int route_idx = 0;
    for (const BusRoute& r : sol.bus_routes) {
        out << "<polyline fill=\"none\" stroke=\"" << kPalette[route_idx % kPaletteSize]
            << "\" stroke-width=\"2\" points=\"";
        for (const ManifestEntry& m : r.manifest) {
            const RoadNode& n = instance.network.at(m.location);
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(n.x), py(n.y));
            out << buf;
        }
        const RoadNode& school = instance.network.at(instance.school);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f", px(school.x), py(school.y));
        out << buf << "\"/>\n";
        ++route_idx;
    }
    for (const StopPoint& s : solution_stops(sol)) {
        const RoadNode& n = instance.network.at(s.location);
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"#333333\"/>\n", px(n.x),
                      py(n.y));
        out << buf;
    }
    for (const auto& [student, mode] : sol.alt_assignments) {
        const Student* s = instance.find_student(student);
        if (!s) continue;
        const RoadNode& n = instance.network.at(s->home);
        const double x = px(n.x), y = py(n.y);
        std::snprintf(buf, sizeof buf,
                      "<path d=\"M %.2f %.2f L %.2f %.2f M %.2f %.2f L %.2f %.2f\" "
                      "stroke=\"#d62728\" stroke-width=\"2\"/>\n",
                      x - 4, y - 4, x + 4, y + 4, x - 4, y + 4, x + 4, y - 4);
        out << buf;
    }
    {
        const RoadNode& n = instance.network.at(instance.school);
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%.2f\" y=\"%.2f\" width=\"12\" height=\"12\" fill=\"#d62728\" "
                      "stroke=\"black\"/>\n",
                      px(n.x) - 6, py(n.y) - 6);
        out << buf;
    }
    out << "</svg>\n";
    return out.str();
}

void emit(const Solution& solution, const Instance& instance, EmitFormat format,
          const std::string& path) {
    std::string body;
    switch (format) {
        case EmitFormat::kTextTable: body = solution_to_text_table(solution); break;
        case EmitFormat::kJson: body = solution_to_json(solution); break;
        case EmitFormat::kGeoJson: body = solution_to_geojson(solution, instance); break;
        case EmitFormat::kSvg: body = solution_to_svg(solution, instance); break;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(path + ": cannot open for writing");
    out << body;
}

}  // namespace sbrp
