#include "mddial/ontology.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "mddial/rng.hpp"

namespace mddial {

namespace {

const std::vector<std::string> kInformable = {"foodtype", "pricerange", "area", "near"};
const std::vector<std::string> kRequestable = {"name", "phonenumber", "address", "price", "postcode"};

const std::vector<std::string> kStreets = {
    "mill road",      "regent street",     "king street",  "hills road",
    "station road",   "bridge street",     "market hill",  "trumpington street"};

std::string synth_price(const std::string& pricerange) {
  if (pricerange == "cheap") return "7-13 pounds";
  if (pricerange == "moderate") return "14-25 pounds";
  return "26-45 pounds";
}

}  // namespace

bool Ontology::is_informable(const std::string& slot) const {
  return std::find(informable_slots.begin(), informable_slots.end(), slot) != informable_slots.end();
}

bool Ontology::is_requestable(const std::string& slot) const {
  return std::find(requestable_slots.begin(), requestable_slots.end(), slot) != requestable_slots.end();
}

bool Ontology::is_slot(const std::string& slot) const {
  return is_informable(slot) || is_requestable(slot);
}

bool Ontology::is_valid_value(const std::string& slot, const std::string& value) const {
  if (value == kDontCare) return is_informable(slot);
  auto it = values.find(slot);
  if (it == values.end()) return false;
  return std::find(it->second.begin(), it->second.end(), value) != it->second.end();
}

void Ontology::validate() const {
  if (informable_slots != kInformable) {
    throw std::invalid_argument("ontology: informable slots must be foodtype, pricerange, area, near");
  }
  if (requestable_slots != kRequestable) {
    throw std::invalid_argument("ontology: requestable slots must be name, phonenumber, address, price, postcode");
  }
  for (const auto& slot : informable_slots) {
    auto it = values.find(slot);
    if (it == values.end() || it->second.empty()) {
      throw std::invalid_argument("ontology: empty value set for slot " + slot);
    }
    std::set<std::string> seen;
    for (const auto& v : it->second) {
      if (v == kDontCare) throw std::invalid_argument("ontology: dontcare may not appear in a value set");
      if (!seen.insert(v).second) throw std::invalid_argument("ontology: duplicate value " + v);
    }
  }
}

nlohmann::json Ontology::to_json() const {
  return nlohmann::json{{"schema_version", "ontology-v1"},
                        {"informable_slots", informable_slots},
                        {"requestable_slots", requestable_slots},
                        {"values", values}};
}

Ontology Ontology::from_json(const nlohmann::json& j) {
  if (j.value("schema_version", "") != "ontology-v1") {
    throw std::invalid_argument("ontology: unsupported schema_version");
  }
  Ontology ont;
  j.at("informable_slots").get_to(ont.informable_slots);
  j.at("requestable_slots").get_to(ont.requestable_slots);
  j.at("values").get_to(ont.values);
  ont.validate();
  return ont;
}

Ontology Ontology::restaurant_domain() {
  Ontology ont;
  ont.informable_slots = kInformable;
  ont.requestable_slots = kRequestable;
  ont.values["foodtype"] = {"british", "chinese", "french",  "indian", "italian",
                            "japanese", "korean",  "mexican", "thai",   "turkish"};
  ont.values["pricerange"] = {"cheap", "moderate", "expensive"};
  ont.values["area"] = {"centre", "north", "south", "east", "west"};
  ont.values["near"] = {"castle", "cinema", "museum", "park",
                        "river",  "stadium", "station", "university"};
  ont.validate();
  return ont;
}

const std::string& Entity::value(const std::string& slot) const {
  auto it = informable.find(slot);
  if (it != informable.end()) return it->second;
  return requestable.at(slot);
}

const Entity& Database::entity(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("entity id out of range");
  return entities[static_cast<std::size_t>(id)];
}

void Database::validate(const Ontology& ont) const {
  if (size() != kDatabaseSize) throw std::invalid_argument("database must hold exactly 149 entities");
  for (int i = 0; i < size(); ++i) {
    const Entity& e = entities[static_cast<std::size_t>(i)];
    if (e.id != i) throw std::invalid_argument("entity ids must be 0..148 in order");
    for (const auto& slot : ont.informable_slots) {
      auto it = e.informable.find(slot);
      if (it == e.informable.end() || it->second == kDontCare || !ont.is_valid_value(slot, it->second)) {
        throw std::invalid_argument("entity " + std::to_string(i) + ": bad value for " + slot);
      }
    }
    for (const auto& slot : ont.requestable_slots) {
      if (!e.requestable.count(slot)) {
        throw std::invalid_argument("entity " + std::to_string(i) + ": missing " + slot);
      }
    }
  }
}

nlohmann::json Database::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const Entity& e : entities) {
    nlohmann::json row{{"id", e.id}};
    for (const auto& [slot, v] : e.informable) row[slot] = v;
    for (const auto& [slot, v] : e.requestable) row[slot] = v;
    rows.push_back(std::move(row));
  }
  return nlohmann::json{{"schema_version", "database-v1"}, {"entities", std::move(rows)}};
}

Database Database::from_json(const nlohmann::json& j, const Ontology& ont) {
  if (j.value("schema_version", "") != "database-v1") {
    throw std::invalid_argument("database: unsupported schema_version");
  }
  Database db;
  for (const auto& row : j.at("entities")) {
    Entity e;
    e.id = row.at("id").get<int>();
    for (const auto& slot : ont.informable_slots) e.informable[slot] = row.at(slot).get<std::string>();
    for (const auto& slot : ont.requestable_slots) e.requestable[slot] = row.at(slot).get<std::string>();
    db.entities.push_back(std::move(e));
  }
  db.validate(ont);
  return db;
}

Database generate_database(std::uint64_t seed, const Ontology& ont) {
  ont.validate();
  RandomStream rng(mix_seed(seed, 0xDB5EEDULL));

  const int kMaxAttempts = 64;
  Database db;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    db.entities.clear();
    db.entities.reserve(kDatabaseSize);
    for (int id = 0; id < kDatabaseSize; ++id) {
      Entity e;
      e.id = id;
      for (const auto& slot : ont.informable_slots) {
        const auto& vals = ont.values.at(slot);
        e.informable[slot] = vals[rng.uniform_below(vals.size())];
      }
      e.requestable["name"] = "venue-" + std::to_string(id);
      e.requestable["phonenumber"] = "01223 " + std::to_string(300000 + id);
      e.requestable["address"] =
          std::to_string(1 + id / static_cast<int>(kStreets.size())) + " " +
          kStreets[static_cast<std::size_t>(id) % kStreets.size()];
      e.requestable["price"] = synth_price(e.informable.at("pricerange"));
      e.requestable["postcode"] = "CB" + std::to_string(1 + id % 5) + " " +
                                  std::to_string(1 + id % 9) +
                                  static_cast<char>('A' + (id * 7) % 26) +
                                  static_cast<char>('A' + (id * 13) % 26);
      db.entities.push_back(std::move(e));
    }

    // Accept once every value of every slot occurs at least once.
    bool covered = true;
    for (const auto& slot : ont.informable_slots) {
      for (const auto& v : ont.values.at(slot)) {
        bool found = false;
        for (const Entity& e : db.entities) {
          if (e.informable.at(slot) == v) {
            found = true;
            break;
          }
        }
        if (!found) {
          covered = false;
          break;
        }
      }
      if (!covered) break;
    }
    if (covered) break;
  }
  db.validate(ont);
  return db;
}

std::vector<int> query_matches(const Database& db, const Ontology& ont,
                               const std::map<std::string, std::string>& constraints) {
  for (const auto& [slot, value] : constraints) {
    if (!ont.is_informable(slot)) {
      throw std::invalid_argument("query: unknown informable slot " + slot);
    }
    if (!ont.is_valid_value(slot, value)) {
      throw std::invalid_argument("query: invalid value " + value + " for slot " + slot);
    }
  }
  std::vector<int> ids;
  for (const Entity& e : db.entities) {
    bool ok = true;
    for (const auto& [slot, value] : constraints) {
      if (value == kDontCare) continue;
      if (e.informable.at(slot) != value) {
        ok = false;
        break;
      }
    }
    if (ok) ids.push_back(e.id);
  }
  return ids;
}

}  // namespace mddial
