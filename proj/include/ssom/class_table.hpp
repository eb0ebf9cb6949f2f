// Class-id table: names, display colors and the movable flag per semantic class.
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

namespace ssom {

using ClassId = uint16_t;  // 0 = unlabeled / empty

struct ClassInfo {
  ClassId id = 0;
  std::string name;
  std::array<uint8_t, 3> rgb{0, 0, 0};
  bool movable = false;
};

class ClassTable {
 public:
  // Built-in default covering the common outdoor label set (cars, pedestrians,
  // road, buildings, vegetation, ... plus the moving-* variants).
  static ClassTable default_table();

  // Loads "id name r g b movable" lines; '#' starts a comment.
  static ClassTable load(const std::string& path);

  void add(const ClassInfo& info);
  bool has(ClassId id) const { return index_.count(id) != 0; }
  const ClassInfo& info(ClassId id) const;  // throws std::out_of_range on unknown id
  const std::vector<ClassInfo>& entries() const { return entries_; }

  std::vector<ClassId> movable_ids() const;

 private:
  std::vector<ClassInfo> entries_;
  std::unordered_set<uint32_t> index_;
};

// Set of movable class ids. Id 0 is never movable.
class MovableSet {
 public:
  MovableSet() = default;
  explicit MovableSet(const std::vector<ClassId>& ids);
  static MovableSet from_table(const ClassTable& table);

  bool contains(ClassId id) const { return id != 0 && ids_.count(id) != 0; }
  size_t size() const { return ids_.size(); }

 private:
  std::unordered_set<uint32_t> ids_;
};

inline bool is_movable(ClassId id, const MovableSet& movable) { return movable.contains(id); }

}  // namespace ssom
