#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace mddial {

/// Wildcard value a user may give for any informable slot. Matches every
/// entity; never stored in one.
inline constexpr const char* kDontCare = "dontcare";

/// Slot-filling domain model: which slots a user can constrain (informable),
/// which they can ask about (requestable), and the value set of each
/// informable slot.
struct Ontology {
  std::vector<std::string> informable_slots;
  std::vector<std::string> requestable_slots;
  std::map<std::string, std::vector<std::string>> values;

  bool is_informable(const std::string& slot) const;
  bool is_requestable(const std::string& slot) const;
  bool is_slot(const std::string& slot) const;

  /// True for members of the slot's value set, and for `dontcare`.
  bool is_valid_value(const std::string& slot, const std::string& value) const;

  /// Throws std::invalid_argument if any structural invariant is broken
  /// (fixed slot lists, non-empty duplicate-free value sets).
  void validate() const;

  nlohmann::json to_json() const;
  static Ontology from_json(const nlohmann::json& j);

  /// The restaurant-information domain this project ships with:
  /// 4 informable slots (foodtype 10 values, pricerange 3, area 5, near 8)
  /// and 5 requestable slots.
  static Ontology restaurant_domain();
};

/// One database record: a value for every informable and requestable slot.
struct Entity {
  int id = -1;
  std::map<std::string, std::string> informable;
  std::map<std::string, std::string> requestable;

  /// Looks up either kind of slot; throws std::out_of_range on unknown slot.
  const std::string& value(const std::string& slot) const;
};

/// Immutable collection of exactly kDatabaseSize entities, id 0..148.
inline constexpr int kDatabaseSize = 149;

struct Database {
  std::vector<Entity> entities;

  const Entity& entity(int id) const;
  int size() const { return static_cast<int>(entities.size()); }

  void validate(const Ontology& ont) const;
  nlohmann::json to_json() const;
  static Database from_json(const nlohmann::json& j, const Ontology& ont);
};

/// Deterministically generates the synthetic database: informable values are
/// drawn uniformly per slot from the ontology; requestable values are
/// synthesized from the entity id (name = "venue-<id>", ...). The sample is
/// redrawn (bounded number of attempts) until every value of every slot is
/// carried by at least one entity, then accepted as-is.
Database generate_database(std::uint64_t seed, const Ontology& ont);

/// Entities matching every non-dontcare constraint exactly, ascending id.
/// Unknown slots or values throw std::invalid_argument.
std::vector<int> query_matches(const Database& db, const Ontology& ont,
                               const std::map<std::string, std::string>& constraints);

}  // namespace mddial
