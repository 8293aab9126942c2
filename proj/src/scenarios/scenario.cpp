#include <cstdlib>
#include <fstream>
#include <sstream>

#include "whatif/scenario.hpp"

#ifndef WHATIF_SOURCE_DATA_DIR
#define WHATIF_SOURCE_DATA_DIR "data"
#endif

namespace whatif {

ParamTable::ParamTable(std::string name, std::vector<std::string> index_space,
                       const EntityRegistry& registry, bool is_mutable)
    : name_(std::move(name)), index_space_(std::move(index_space)), mutable_(is_mutable) {
  std::size_t n = 1;
  for (const auto& kind : index_space_) {
    axes_.push_back(registry.entities(kind));
    n *= axes_.back().size();
  }
  values_.assign(n, 0.0);
}

std::ptrdiff_t ParamTable::offset(std::span<const std::string> index) const {
  if (index.size() != axes_.size()) return -1;
  std::size_t flat = 0;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto& axis = axes_[i];
    std::size_t pos = 0;
    while (pos < axis.size() && axis[pos] != index[i]) ++pos;
    if (pos == axis.size()) return -1;
    flat = flat * axis.size() + pos;
  }
  return static_cast<std::ptrdiff_t>(flat);
}

std::vector<std::string> ParamTable::index_of(std::size_t offset) const {
  std::vector<std::string> out(axes_.size());
  for (std::size_t i = axes_.size(); i-- > 0;) {
    out[i] = axes_[i][offset % axes_[i].size()];
    offset /= axes_[i].size();
  }
  return out;
}

double ParamTable::get(std::span<const std::string> index) const {
  const auto off = offset(index);
  if (off < 0) throw Error(ErrorKind::UnknownEntity, name_ + ": index outside table");
  return values_[static_cast<std::size_t>(off)];
}

double ParamTable::operator()(std::initializer_list<std::string_view> index) const {
  std::vector<std::string> idx(index.begin(), index.end());
  return get(idx);
}

void ParamTable::set(std::span<const std::string> index, double value) {
  const auto off = offset(index);
  if (off < 0) throw Error(ErrorKind::UnknownEntity, name_ + ": index outside table");
  values_[static_cast<std::size_t>(off)] = value;
}

void ParamSet::add(ParamTable table) {
  if (find(table.name()) != nullptr) {
    throw Error(ErrorKind::DataFormat, "parameter '" + table.name() + "' added twice");
  }
  tables_.push_back(std::move(table));
}

const ParamTable* ParamSet::find(std::string_view name) const {
  for (const auto& t : tables_) {
    if (t.name() == name) return &t;
  }
  return nullptr;
}

ParamTable* ParamSet::find(std::string_view name) {
  for (auto& t : tables_) {
    if (t.name() == name) return &t;
  }
  return nullptr;
}

const ParamTable& ParamSet::at(std::string_view name) const {
  const ParamTable* t = find(name);
  if (t == nullptr) throw Error(ErrorKind::UnknownParam, "no parameter '" + std::string(name) + "'");
  return *t;
}

std::string Scenario::dump() const {
  std::ostringstream out;
  out << "scenario " << id << '\n';
  for (const auto& t : params.tables()) {
    out << "param " << t.name() << '\n';
    for (std::size_t k = 0; k < t.size(); ++k) {
      out << "  [";
      const auto idx = t.index_of(k);
      for (std::size_t i = 0; i < idx.size(); ++i) out << (i ? "," : "") << idx[i];
      out << "] = " << format_number(t.value(k)) << '\n';
    }
  }
  out << build().dump();
  return out.str();
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("WHATIF_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return WHATIF_SOURCE_DATA_DIR;
}

Scenario load_scenario(std::string_view id) { return load_scenario(id, default_data_dir()); }

Scenario load_scenario(std::string_view id, const std::filesystem::path& data_dir) {
  bool known = false;
  for (const auto& s : scenario_ids()) known = known || s == id;
  if (!known) throw Error(ErrorKind::UnknownScenario, "no scenario '" + std::string(id) + "'");
  const auto path = data_dir / "scenarios" / (std::string(id) + ".dat");
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  Scenario sc = parse_scenario(id, text.str());
  sc.baseline = solve(sc.build());
  return sc;
}

}  // namespace whatif
