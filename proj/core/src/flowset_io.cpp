#include "sp2/flowset_io.hpp"

#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace sp2 {

using nlohmann::json;

namespace {

Coord parse_coord(const json& j, const char* what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw FormatError(std::string(what) + " must be a [row, col] pair");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

template <typename T>
T required(const json& obj, const char* key) {
    if (!obj.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw FormatError(std::string("field \"") + key + "\" has the wrong type");
    }
}

Coord endpoint_router(const Topology& t, NodeId n) { return t.coord_of(RouterId{n.index}); }

}  // namespace

FlowSet parse_flowset(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("topology") || !doc.contains("flows")) {
        throw FormatError("document needs \"topology\" and \"flows\"");
    }
    const json& topo = doc["topology"];
    if (topo.value("type", std::string("mesh")) != "mesh") throw FormatError("only mesh topologies are supported");
    std::shared_ptr<const Topology> topology;
    try {
        topology = std::make_shared<const Topology>(Topology::build_mesh(
            required<int>(topo, "rows"), required<int>(topo, "cols"), topo.value("core_links", false)));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }

    if (!doc["flows"].is_array()) throw FormatError("\"flows\" must be an array");
    std::vector<Flow> flows;
    for (const json& jf : doc["flows"]) {
        Flow f;
        f.id = required<int>(jf, "id");
        f.priority = required<int>(jf, "priority");
        f.flits = required<Cycles>(jf, "flits");
        f.period = required<Cycles>(jf, "period");
        f.deadline = required<Cycles>(jf, "deadline");
        const std::string who = "flow " + std::to_string(f.id) + ": ";
        try {
            if (jf.contains("path")) {
                std::vector<LinkId> links;
                for (const json& d : jf["path"]) {
                    if (!d.is_string()) throw FormatError(who + "path entries must be link names");
                    const auto id = topology->link_by_name(d.get<std::string>());
                    if (!id) throw FormatError(who + "unknown link \"" + d.get<std::string>() + "\"");
                    links.push_back(*id);
                }
                f.path = topology->make_path(std::move(links));
            } else {
                const Coord src = parse_coord(required<json>(jf, "source"), "source");
                const Coord dst = parse_coord(required<json>(jf, "dest"), "dest");
                f.path = topology->xy_route(topology->router_at(src), topology->router_at(dst));
            }
        } catch (const std::invalid_argument& e) {
            throw FormatError(who + e.what());
        }
        flows.push_back(std::move(f));
    }
    try {
        return FlowSet(std::move(topology), std::move(flows));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

FlowSet load_flowset(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_flowset(buf.str());
}

std::string serialize_flowset(const FlowSet& fs) {
    const Topology& t = fs.topology();
    json doc;
    doc["topology"] = {{"type", "mesh"}, {"rows", t.rows()}, {"cols", t.cols()}, {"core_links", t.has_core_links()}};
    json flows = json::array();
    for (const Flow& f : fs.flows()) {
        const Coord src = endpoint_router(t, t.link(f.path.links.front()).src);
        const Coord dst = endpoint_router(t, t.link(f.path.links.back()).dst);
        json path = json::array();
        for (LinkId l : f.path.links) path.push_back(t.link_name(l));
        flows.push_back({{"id", f.id},
                         {"priority", f.priority},
                         {"flits", f.flits},
                         {"period", f.period},
                         {"deadline", f.deadline},
                         {"source", {src.row, src.col}},
                         {"dest", {dst.row, dst.col}},
                         {"path", path}});
    }
    doc["flows"] = std::move(flows);
    return doc.dump(2) + "\n";
}

void save_flowset(const FlowSet& fs, const std::filesystem::path& file) {
    std::ofstream out(file);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    out << serialize_flowset(fs);
    if (!out) throw std::runtime_error("write failed for " + file.string());
}

void write_analysis_csv(std::ostream& os, const FlowSet& fs, const AnalysisResult& result) {
    os << "flow_id,eta,c_hat,R_sp2,R_baseline,schedulable_sp2,schedulable_baseline,iters\n";
    auto opt = [](const std::optional<Cycles>& v) { return v ? std::to_string(*v) : std::string(); };
    for (std::size_t k = 0; k < fs.size(); ++k) {
        const auto& fa = result.flows.at(k);
        os << fs[k].id << ',' << fs[k].eta() << ',' << effective_time(fs[k]) << ',' << opt(fa.r_sp2) << ','
           << opt(fa.r_baseline) << ',' << (fa.schedulable_sp2() ? 1 : 0) << ','
           << (fa.schedulable_baseline() ? 1 : 0) << ',' << fa.iterations_sp2 << '\n';
    }
}

}  // namespace sp2
