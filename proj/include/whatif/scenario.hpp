#pragma once

// Benchmark optimization scenarios: entity registries, parameter tables,
// deterministic model builders and the cached baseline solve.

#include <filesystem>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "whatif/model.hpp"
#include "whatif/solver.hpp"

namespace whatif {

// A dense numeric table over the cross product of its index kinds.
class ParamTable {
 public:
  ParamTable(std::string name, std::vector<std::string> index_space,
             const EntityRegistry& registry, bool is_mutable = true);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& index_space() const { return index_space_; }
  bool is_mutable() const { return mutable_; }
  std::size_t size() const { return values_.size(); }

  // Flat position of an index tuple, or -1 when any entity is not in range.
  std::ptrdiff_t offset(std::span<const std::string> index) const;
  std::vector<std::string> index_of(std::size_t offset) const;

  double get(std::span<const std::string> index) const;
  double operator()(std::initializer_list<std::string_view> index) const;
  void set(std::span<const std::string> index, double value);

  double value(std::size_t offset) const { return values_.at(offset); }
  void set_value(std::size_t offset, double value) { values_.at(offset) = value; }
  const std::vector<double>& values() const { return values_; }

  friend bool operator==(const ParamTable& a, const ParamTable& b) {
    return a.name_ == b.name_ && a.index_space_ == b.index_space_ && a.values_ == b.values_;
  }

 private:
  std::string name_;
  std::vector<std::string> index_space_;
  std::vector<std::vector<std::string>> axes_;
  std::vector<double> values_;
  bool mutable_;
};

class ParamSet {
 public:
  void add(ParamTable table);
  const ParamTable* find(std::string_view name) const;
  ParamTable* find(std::string_view name);
  const ParamTable& at(std::string_view name) const;
  const std::vector<ParamTable>& tables() const { return tables_; }

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<ParamTable> tables_;
};

using ModelBuilder = std::function<Model(const EntityRegistry&, const ParamSet&)>;

// Which variable families are drawn as arcs in the plan graph.
struct PlanArcFamily {
  std::string family;
  std::size_t from_pos = 0;
  std::size_t to_pos = 1;
  std::optional<std::size_t> label_pos;  // index position used as flow label
  std::string label;                     // fixed label when label_pos is empty
};

struct Scenario {
  std::string id;
  std::string description;
  EntityRegistry registry;
  ParamSet params;
  std::vector<std::string> denied_keywords;
  std::vector<PlanArcFamily> plan_arcs;
  ModelBuilder builder;
  SolveResult baseline;

  Model build() const { return builder(registry, params); }
  Model build(const ParamSet& edited) const { return builder(registry, edited); }
  // Canonical text of entities, params and the built model.
  std::string dump() const;
};

inline const std::vector<std::string>& scenario_ids() {
  static const std::vector<std::string> ids = {"coffee", "facility_location", "mcnf",
                                               "workforce", "tsp"};
  return ids;
}

// WHATIF_DATA_DIR when set, else the repository data/ directory.
std::filesystem::path default_data_dir();

// Loads data/scenarios/<id>.dat, builds and solves the baseline.
Scenario load_scenario(std::string_view id);
Scenario load_scenario(std::string_view id, const std::filesystem::path& data_dir);

// Parses scenario data text. Does not solve; `baseline` stays empty.
Scenario parse_scenario(std::string_view id, std::string_view text);

ModelBuilder builder_for(std::string_view id);
std::vector<PlanArcFamily> plan_arcs_for(std::string_view id);

// --- plan view -------------------------------------------------------------

struct PlanNode {
  std::string id;
  std::string kind;
};
struct PlanFlow {
  std::string label;
  double quantity = 0.0;
};
struct PlanArc {
  std::string from;
  std::string to;
  std::vector<PlanFlow> flows;
  double cost = 0.0;
};
struct CostItem {
  std::string name;
  double value = 0.0;
};
struct PlanGraph {
  std::vector<PlanNode> nodes;
  std::vector<PlanArc> arcs;
  std::vector<CostItem> breakdown;
  double total = 0.0;
};

// Arcs with zero flow are omitted. Throws InfeasibleAssignment.
PlanGraph plan_view(const Scenario& scenario, const Model& model, const Assignment& assignment);
PlanGraph plan_view(const Scenario& scenario, const Assignment& assignment);

}  // namespace whatif
