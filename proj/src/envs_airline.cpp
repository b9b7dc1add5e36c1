#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "catforge/util/rng.hpp"
#include "envs_internal.hpp"

namespace catforge::envs {

namespace {

using env::EpisodeMode;
using env::ToolError;
using env::ToolRegistry;
using env::ToolSpec;

constexpr std::array<const char*, 10> kAirports = {
    "JFK", "LAX", "ORD", "SFO", "SEA", "ATL", "DFW", "BOS", "DEN", "MIA"};

constexpr std::array<const char*, 5> kDates = {
    "2024-05-18", "2024-05-19", "2024-05-20", "2024-05-21", "2024-05-22"};

constexpr std::array<const char*, 12> kFirstNames = {
    "raj", "chen", "anna", "omar", "lucia", "ivan", "aiko", "tara",
    "felix", "nora", "dmitri", "zoe"};

constexpr std::array<const char*, 12> kLastNames = {
    "sharma", "wei", "kovacs", "haddad", "rossi", "petrov", "tanaka",
    "oconnor", "schmidt", "larsen", "ivanov", "walker"};

constexpr std::array<const char*, 2> kCabins = {"economy", "business"};

std::string flight_key(const std::string& number, const std::string& date) {
  return number + "_" + date;
}

std::string make_reservation_id(util::Rng& rng, const std::set<std::string>& taken) {
  static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  for (;;) {
    std::string id;
    for (int k = 0; k < 6; ++k) id += alphabet[rng.below(36)];
    if (!taken.count(id)) return id;
  }
}

struct Generator {
  util::Rng rng;
  EnvState state;
  int card_n = 0;
  int gift_n = 0;
  int cert_n = 0;

  explicit Generator(std::uint64_t seed) : rng(util::derive_seed(seed, 0x6169726cULL)) {
    state.rng_seed = seed;
  }

  void gen_flights(int count) {
    std::set<std::string> numbers;
    while (static_cast<int>(numbers.size()) < count) {
      numbers.insert("HAT" + std::to_string(100 + rng.below(900)));
    }
    for (const std::string& number : numbers) {
      std::size_t o = rng.below(kAirports.size());
      std::size_t d = rng.below(kAirports.size() - 1);
      if (d >= o) ++d;
      for (const char* date : kDates) {
        std::int64_t economy_cents = 8000 + static_cast<std::int64_t>(rng.below(32000));
        state.tables["flights"][flight_key(number, date)] = Value(Value::Map{
            {"flight_number", Value(number)},
            {"date", Value(std::string(date))},
            {"origin", Value(std::string(kAirports[o]))},
            {"destination", Value(std::string(kAirports[d]))},
            {"prices", Value(Value::Map{{"economy", Value(dollars(economy_cents))},
                                        {"business", Value(dollars(economy_cents * 3))}})},
            {"available_seats", Value(static_cast<std::int64_t>(3 + rng.below(12)))},
        });
      }
    }
  }

  Value make_payment_method(const char* kind) {
    if (std::string(kind) == "credit_card") {
      return Value(Value::Map{{"id", Value("credit_card_" + std::to_string(++card_n))},
                              {"source", Value("credit_card")},
                              {"last_four", Value(std::to_string(1000 + rng.below(9000)))}});
    }
    return Value(Value::Map{
        {"id", Value("gift_card_" + std::to_string(++gift_n))},
        {"source", Value("gift_card")},
        {"amount", Value(dollars(5000 + static_cast<std::int64_t>(rng.below(45000))))}});
  }

  std::vector<std::string> gen_users(int count) {
    std::vector<std::string> ids;
    std::set<std::string> taken;
    static const std::array<const char*, 3> tiers = {"regular", "silver", "gold"};
    while (static_cast<int>(ids.size()) < count) {
      std::string first = rng.pick(kFirstNames);
      std::string last = rng.pick(kLastNames);
      std::string user_id = first + "_" + last + "_" + std::to_string(100 + rng.below(900));
      if (!taken.insert(user_id).second) continue;
      Value::Map methods;
      Value card = make_payment_method("credit_card");
      methods[card.as_map().at("id").as_str()] = card;
      Value gift = make_payment_method("gift_card");
      methods[gift.as_map().at("id").as_str()] = gift;
      state.tables["users"][user_id] = Value(Value::Map{
          {"user_id", Value(user_id)},
          {"name", Value(first + " " + last)},
          {"membership", Value(std::string(rng.pick(tiers)))},
          {"payment_methods", Value(std::move(methods))},
      });
      ids.push_back(user_id);
    }
    return ids;
  }

  Value flight_leg(const Value::Map& flight, const std::string& cabin) {
    return Value(Value::Map{
        {"flight_number", flight.at("flight_number")},
        {"date", flight.at("date")},
        {"origin", flight.at("origin")},
        {"destination", flight.at("destination")},
        {"price", flight.at("prices").as_map().at(cabin)},
    });
  }

  void gen_reservations(const std::vector<std::string>& users, int per_user) {
    std::set<std::string> taken;
    std::vector<std::string> flight_keys;
    for (const auto& [key, record] : state.tables.at("flights")) flight_keys.push_back(key);
    for (const auto& user_id : users) {
      for (int k = 0; k < per_user; ++k) {
        std::string res_id = make_reservation_id(rng, taken);
        taken.insert(res_id);
        std::string cabin = kCabins[rng.below(2)];
        Value::List legs;
        std::uint64_t leg_count = 1 + rng.below(2);
        std::int64_t total_cents = 0;
        for (std::uint64_t leg = 0; leg < leg_count; ++leg) {
          const auto& flight =
              state.tables.at("flights").at(rng.pick(flight_keys)).as_map();
          legs.push_back(flight_leg(flight, cabin));
          total_cents += static_cast<std::int64_t>(
              flight.at("prices").as_map().at(cabin).as_float() * 100.0 + 0.5);
        }
        const auto& user = state.tables.at("users").at(user_id).as_map();
        const auto& methods = user.at("payment_methods").as_map();
        auto mit = methods.begin();
        std::advance(mit, static_cast<long>(rng.below(methods.size())));
        state.tables["reservations"][res_id] = Value(Value::Map{
            {"reservation_id", Value(res_id)},
            {"user_id", Value(user_id)},
            {"status", Value("active")},
            {"cabin", Value(cabin)},
            {"flights", Value(std::move(legs))},
            {"payment_history",
             Value(Value::List{Value(Value::Map{{"payment_id", Value(mit->first)},
                                                {"amount", Value(dollars(total_cents))}})})},
        });
      }
    }
  }

  void run(Scale scale) {
    int flight_count = scale == Scale::Small ? 8 : 25;
    int user_count = scale == Scale::Small ? 6 : 40;
    int per_user = scale == Scale::Small ? 2 : 3;
    gen_flights(flight_count);
    std::vector<std::string> users = gen_users(user_count);
    gen_reservations(users, per_user);
    state.tables["meta"]["meta"] = Value(Value::Map{{"next_booking", Value(std::int64_t{1})}});
  }
};

Value::Map& fetch(EnvState& state, const char* table, const std::string& id,
                  const char* what) {
  auto tit = state.tables.find(table);
  if (tit == state.tables.end() || !tit->second.count(id)) {
    throw ToolError(ToolError::Code::NotFound,
                    std::string(what) + " '" + id + "' not found");
  }
  return tit->second.at(id).as_map();
}

double reservation_total(const Value::Map& reservation) {
  std::int64_t cents = 0;
  for (const Value& leg : reservation.at("flights").as_list()) {
    cents += static_cast<std::int64_t>(leg.as_map().at("price").as_float() * 100.0 + 0.5);
  }
  return dollars(cents);
}

void require_payment_id(EnvState& state, const Value::Map& reservation,
                        const std::string& payment_id) {
  const auto& user = fetch(state, "users", reservation.at("user_id").as_str(), "user");
  if (!user.at("payment_methods").as_map().count(payment_id)) {
    throw ToolError(ToolError::Code::NotFound,
                    "payment method '" + payment_id + "' not found for user");
  }
}

std::string require_cabin(const Value& v) {
  const std::string& cabin = v.as_str();
  if (cabin != "economy" && cabin != "business") {
    throw ToolError(ToolError::Code::BadArgument,
                    "cabin must be 'economy' or 'business', got '" + cabin + "'");
  }
  return cabin;
}

ToolRegistry build_registry() {
  ToolRegistry reg;
  reg.add({"get_user_details",
           {{"user_id", "string", true}},
           "Look up a user profile, membership tier, and payment methods.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(fetch(state, "users", args.at("user_id").as_str(), "user"));
          });
  reg.add({"get_reservation_details",
           {{"reservation_id", "string", true}},
           "Look up a reservation by its 6-character id.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(fetch(state, "reservations",
                               args.at("reservation_id").as_str(), "reservation"));
          });
  reg.add({"search_direct_flight",
           {{"origin", "string", true},
            {"destination", "string", true},
            {"date", "string", true}},
           "List direct flights between two airports on a date.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::List out;
            for (const auto& [key, record] : state.tables.at("flights")) {
              const auto& flight = record.as_map();
              if (flight.at("origin").as_str() == args.at("origin").as_str() &&
                  flight.at("destination").as_str() ==
                      args.at("destination").as_str() &&
                  flight.at("date").as_str() == args.at("date").as_str()) {
                out.push_back(record);
              }
            }
            return Value(std::move(out));
          });
  reg.add({"update_reservation_flights",
           {{"reservation_id", "string", true},
            {"flights", "list", true},
            {"cabin", "string", true},
            {"payment_id", "string", true}},
           "Replace the flight legs of an active reservation. `flights` is a "
           "list of {flight_number, date} maps; the fare difference is "
           "charged or refunded to payment_id.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& reservation = fetch(state, "reservations",
                                            args.at("reservation_id").as_str(),
                                            "reservation");
            if (reservation.at("status").as_str() != "active") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "reservation is not active");
            }
            std::string cabin = require_cabin(args.at("cabin"));
            require_payment_id(state, reservation, args.at("payment_id").as_str());
            const Value::List& wanted = args.at("flights").as_list();
            if (wanted.empty()) {
              throw ToolError(ToolError::Code::BadArgument, "flights is empty");
            }
            Value::List legs;
            std::int64_t new_cents = 0;
            for (const Value& item : wanted) {
              if (!item.is_map() || !item.as_map().count("flight_number") ||
                  !item.as_map().count("date")) {
                throw ToolError(ToolError::Code::BadArgument,
                                "each flight needs flight_number and date");
              }
              const std::string key = flight_key(item.as_map().at("flight_number").as_str(),
                                                 item.as_map().at("date").as_str());
              auto fit = state.tables.at("flights").find(key);
              if (fit == state.tables.at("flights").end()) {
                throw ToolError(ToolError::Code::NotFound,
                                "flight '" + key + "' not found");
              }
              const auto& flight = fit->second.as_map();
              legs.push_back(Value(Value::Map{
                  {"flight_number", flight.at("flight_number")},
                  {"date", flight.at("date")},
                  {"origin", flight.at("origin")},
                  {"destination", flight.at("destination")},
                  {"price", flight.at("prices").as_map().at(cabin)},
              }));
              new_cents += static_cast<std::int64_t>(
                  flight.at("prices").as_map().at(cabin).as_float() * 100.0 + 0.5);
            }
            std::int64_t old_cents =
                static_cast<std::int64_t>(reservation_total(reservation) * 100.0 + 0.5);
            reservation["flights"] = Value(std::move(legs));
            reservation["cabin"] = Value(cabin);
            reservation["payment_history"].as_list().push_back(
                Value(Value::Map{{"payment_id", args.at("payment_id")},
                                 {"amount", Value(dollars(new_cents - old_cents))}}));
            return Value(reservation);
          });
  reg.add({"book_reservation",
           {{"user_id", "string", true},
            {"origin", "string", true},
            {"destination", "string", true},
            {"date", "string", true},
            {"cabin", "string", true},
            {"payment_id", "string", true}},
           "Book the cheapest direct flight matching the route and date.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            const auto& user = fetch(state, "users", args.at("user_id").as_str(), "user");
            std::string cabin = require_cabin(args.at("cabin"));
            if (!user.at("payment_methods").as_map().count(args.at("payment_id").as_str())) {
              throw ToolError(ToolError::Code::NotFound,
                              "payment method '" + args.at("payment_id").as_str() +
                                  "' not found for user");
            }
            const Value::Map* best = nullptr;
            for (const auto& [key, record] : state.tables.at("flights")) {
              const auto& flight = record.as_map();
              if (flight.at("origin").as_str() != args.at("origin").as_str() ||
                  flight.at("destination").as_str() !=
                      args.at("destination").as_str() ||
                  flight.at("date").as_str() != args.at("date").as_str()) {
                continue;
              }
              if (!best || flight.at("prices").as_map().at(cabin).as_float() <
                               best->at("prices").as_map().at(cabin).as_float()) {
                best = &flight;
              }
            }
            if (!best) {
              throw ToolError(ToolError::Code::NotFound,
                              "no direct flight matches that route and date");
            }
            // Deterministic fresh id: derived from the world seed and a
            // persistent booking counter.
            Value::Map& meta = state.tables.at("meta").at("meta").as_map();
            std::int64_t ordinal = meta.at("next_booking").as_int();
            meta["next_booking"] = Value(ordinal + 1);
            util::Rng id_rng(util::derive_seed(state.rng_seed,
                                               0xb00cULL + static_cast<std::uint64_t>(ordinal)));
            std::set<std::string> taken;
            for (const auto& [id, r] : state.tables.at("reservations")) taken.insert(id);
            std::string res_id = make_reservation_id(id_rng, taken);
            double price = best->at("prices").as_map().at(cabin).as_float();
            Value::Map reservation{
                {"reservation_id", Value(res_id)},
                {"user_id", args.at("user_id")},
                {"status", Value("active")},
                {"cabin", Value(cabin)},
                {"flights",
                 Value(Value::List{Value(Value::Map{
                     {"flight_number", best->at("flight_number")},
                     {"date", best->at("date")},
                     {"origin", best->at("origin")},
                     {"destination", best->at("destination")},
                     {"price", Value(price)}})})},
                {"payment_history",
                 Value(Value::List{Value(Value::Map{{"payment_id", args.at("payment_id")},
                                                    {"amount", Value(price)}})})},
            };
            state.tables["reservations"][res_id] = Value(reservation);
            return Value(std::move(reservation));
          });
  reg.add({"cancel_reservation",
           {{"reservation_id", "string", true}},
           "Cancel an active reservation and refund the original payment.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& reservation = fetch(state, "reservations",
                                            args.at("reservation_id").as_str(),
                                            "reservation");
            if (reservation.at("status").as_str() != "active") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "reservation is not active");
            }
            reservation["status"] = Value("cancelled");
            const auto& first_payment =
                reservation.at("payment_history").as_list().front().as_map();
            reservation["payment_history"].as_list().push_back(Value(Value::Map{
                {"payment_id", first_payment.at("payment_id")},
                {"amount", Value(-reservation_total(reservation))}}));
            return Value(reservation);
          });
  reg.add({"list_user_ids", {}, "List every user id in the database.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("users")) out.push_back(Value(id));
            return Value(std::move(out));
          });
  reg.add({"list_reservation_ids", {}, "List every reservation id.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("reservations")) {
              out.push_back(Value(id));
            }
            return Value(std::move(out));
          });
  return reg;
}

class AirlineEnv : public Environment {
 public:
  explicit AirlineEnv(Scale scale) : scale_(scale), registry_(build_registry()) {}

  std::string name() const override { return "airline"; }

  EnvState reset(std::uint64_t seed) const override {
    Generator gen(seed);
    gen.run(scale_);
    return std::move(gen.state);
  }

  const env::ToolRegistry& tools() const override { return registry_; }

  std::string description() const override {
    return "Airline booking desk. Reservations hold flight legs in a cabin "
           "class; active reservations can be rebooked onto other flights or "
           "cancelled, and new reservations can be booked. Success is judged "
           "by the resulting reservation state.";
  }

  bool answer_mode() const override { return false; }

 private:
  Scale scale_;
  env::ToolRegistry registry_;
};

}  // namespace

std::unique_ptr<Environment> make_airline_env(Scale scale) {
  return std::make_unique<AirlineEnv>(scale);
}

}  // namespace catforge::envs
