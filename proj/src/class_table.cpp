#include "ssom/class_table.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ssom {

ClassTable ClassTable::default_table() {
  ClassTable t;
  auto row = [&t](ClassId id, const char* name, uint8_t r, uint8_t g, uint8_t b, bool mov) {
    t.add({id, name, {r, g, b}, mov});
  };
  row(0, "unlabeled", 0, 0, 0, false);
  row(1, "outlier", 255, 0, 0, false);
  row(10, "car", 100, 150, 245, true);
  row(11, "bicycle", 100, 230, 245, true);
  row(13, "bus", 100, 80, 250, true);
  row(15, "motorcycle", 30, 60, 150, true);
  row(16, "on-rails", 0, 0, 255, false);
  row(18, "truck", 80, 30, 180, true);
  row(20, "other-vehicle", 0, 0, 255, true);
  row(30, "person", 255, 30, 30, true);
  row(31, "bicyclist", 255, 40, 200, true);
  row(32, "motorcyclist", 150, 30, 90, true);
  row(40, "road", 255, 0, 255, false);
  row(44, "parking", 255, 150, 255, false);
  row(48, "sidewalk", 75, 0, 75, false);
  row(49, "other-ground", 175, 0, 75, false);
  row(50, "building", 255, 200, 0, false);
  row(51, "fence", 255, 120, 50, false);
  row(52, "other-structure", 255, 150, 0, false);
  row(60, "lane-marking", 150, 255, 170, false);
  row(70, "vegetation", 0, 175, 0, false);
  row(71, "trunk", 135, 60, 0, false);
  row(72, "terrain", 150, 240, 80, false);
  row(80, "pole", 255, 240, 150, false);
  row(81, "traffic-sign", 255, 0, 0, false);
  row(99, "other-object", 50, 255, 255, false);
  row(252, "moving-car", 100, 150, 245, true);
  row(253, "moving-bicyclist", 255, 40, 200, true);
  row(254, "moving-person", 255, 30, 30, true);
  row(255, "moving-motorcyclist", 150, 30, 90, true);
  row(256, "moving-on-rails", 0, 0, 255, true);
  row(257, "moving-bus", 100, 80, 250, true);
  row(258, "moving-truck", 80, 30, 180, true);
  row(259, "moving-other-vehicle", 0, 0, 255, true);
  return t;
}

ClassTable ClassTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open class table '" + path + "'");
  ClassTable t;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    ClassInfo info;
    unsigned id, r, g, b;
    int movable;
    if (!(row >> id)) continue;  // blank line
    if (!(row >> info.name >> r >> g >> b >> movable) || id > 0xFFFF || r > 255 || g > 255 || b > 255)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'id name r g b movable'");
    info.id = static_cast<ClassId>(id);
    info.rgb = {static_cast<uint8_t>(r), static_cast<uint8_t>(g), static_cast<uint8_t>(b)};
    info.movable = movable != 0;
    t.add(info);
  }
  return t;
}

void ClassTable::add(const ClassInfo& info) {
  if (index_.count(info.id)) throw std::runtime_error("duplicate class id in table");
  index_.insert(info.id);
  entries_.push_back(info);
}

const ClassInfo& ClassTable::info(ClassId id) const {
  for (const auto& e : entries_)
    if (e.id == id) return e;
  throw std::out_of_range("unknown class id " + std::to_string(id));
}

std::vector<ClassId> ClassTable::movable_ids() const {
  std::vector<ClassId> ids;
  for (const auto& e : entries_)
    if (e.movable) ids.push_back(e.id);
  return ids;
}

MovableSet::MovableSet(const std::vector<ClassId>& ids) {
  for (ClassId id : ids)
    if (id != 0) ids_.insert(id);
}

MovableSet MovableSet::from_table(const ClassTable& table) { return MovableSet(table.movable_ids()); }

}  // namespace ssom
