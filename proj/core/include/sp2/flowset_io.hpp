#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "sp2/flowset.hpp"
#include "sp2/rta.hpp"

namespace sp2 {

/// Malformed or inconsistent flow-set document.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flow-set documents are JSON:
///
///   { "topology": { "type": "mesh", "rows": 3, "cols": 3, "core_links": false },
///     "flows": [ { "id": 1, "priority": 1, "flits": 20, "period": 200,
///                  "deadline": 200, "source": [0, 0], "dest": [0, 1],
///                  "path": ["R(0,0)->R(0,1)"] } ] }
///
/// "path" is optional and, when present, overrides XY routing from source to
/// dest. Link descriptors use Topology::link_name.
[[nodiscard]] FlowSet parse_flowset(std::string_view text);
[[nodiscard]] FlowSet load_flowset(const std::filesystem::path& file);

/// Always writes explicit paths, so parse_flowset(serialize_flowset(f)) == f.
[[nodiscard]] std::string serialize_flowset(const FlowSet& fs);
void save_flowset(const FlowSet& fs, const std::filesystem::path& file);

/// Columns: flow_id,eta,c_hat,R_sp2,R_baseline,schedulable_sp2,schedulable_baseline,iters
/// Missing response times are written as empty fields; iters counts the
/// SP2 fixed-point iterations.
void write_analysis_csv(std::ostream& os, const FlowSet& fs, const AnalysisResult& result);

}  // namespace sp2
