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

constexpr std::array<const char*, 30> kProductNames = {
    "desk lamp", "water bottle", "office chair", "backpack", "notebook",
    "wireless mouse", "mechanical keyboard", "running shoes", "coffee maker",
    "headphones", "bluetooth speaker", "travel mug", "yoga mat", "wall clock",
    "table fan", "monitor stand", "phone case", "laptop sleeve",
    "desk organizer", "reading light", "electric kettle", "camping lantern",
    "hiking boots", "rain jacket", "wool scarf", "leather wallet",
    "canvas tote", "picnic blanket", "lunch box", "garden trowel"};

constexpr std::array<const char*, 20> kFirstNames = {
    "noah", "mia", "liam", "emma", "oliver", "ava", "ethan", "sofia",
    "lucas", "isabella", "mason", "amelia", "james", "harper", "henry",
    "evelyn", "daniel", "luna", "jack", "aria"};

constexpr std::array<const char*, 20> kLastNames = {
    "patel", "garcia", "kim", "nguyen", "smith", "johnson", "lee", "brown",
    "martinez", "davis", "wilson", "anderson", "taylor", "thomas", "moore",
    "jackson", "white", "harris", "clark", "lewis"};

constexpr std::array<const char*, 8> kStreets = {
    "Oak Lane", "Maple Street", "Cedar Avenue", "Pine Road", "Elm Drive",
    "Birch Court", "Walnut Way", "Chestnut Boulevard"};

constexpr std::array<std::pair<const char*, const char*>, 8> kCities = {{
    {"Springfield", "62701"}, {"Riverton", "84065"}, {"Fairview", "97024"},
    {"Georgetown", "40324"}, {"Ashland", "41101"}, {"Millbrook", "36054"},
    {"Oakdale", "95361"}, {"Brookside", "64012"}}};

constexpr std::array<const char*, 6> kColors = {"black", "white", "red",
                                                "blue", "green", "silver"};
constexpr std::array<const char*, 3> kSizes = {"small", "medium", "large"};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct Generator {
  util::Rng rng;
  EnvState state;
  int item_ordinal = 0;
  int paypal_n = 0;
  int card_n = 0;
  int gift_n = 0;

  explicit Generator(std::uint64_t seed) : rng(util::derive_seed(seed, 0x7265746169ULL)) {
    state.rng_seed = seed;
  }

  Value make_variant(const std::string& product_id, bool sized) {
    Value::Map options{{"color", Value(std::string(rng.pick(kColors)))}};
    if (sized) options["size"] = Value(std::string(rng.pick(kSizes)));
    std::string item_id = "I" + std::to_string(10001 + item_ordinal++);
    return Value(Value::Map{
        {"item_id", Value(item_id)},
        {"product_id", Value(product_id)},
        {"options", Value(std::move(options))},
        {"price", Value(dollars(500 + static_cast<std::int64_t>(rng.below(19500))))},
        {"available", Value(true)},
    });
  }

  void gen_products(int count) {
    for (int i = 0; i < count; ++i) {
      std::string product_id = "P" + std::to_string(4001 + i);
      bool sized = rng.chance(0.5);
      Value::Map variants;
      std::uint64_t n = 2 + rng.below(3);
      for (std::uint64_t k = 0; k < n; ++k) {
        Value variant = make_variant(product_id, sized);
        variants[variant.as_map().at("item_id").as_str()] = variant;
      }
      state.tables["products"][product_id] = Value(Value::Map{
          {"product_id", Value(product_id)},
          {"name", Value(std::string(kProductNames[static_cast<std::size_t>(i) %
                                                   kProductNames.size()]))},
          {"variants", Value(std::move(variants))},
      });
    }
  }

  Value make_payment_method() {
    switch (rng.below(3)) {
      case 0:
        return Value(Value::Map{{"id", Value("paypal_" + std::to_string(++paypal_n))},
                                {"source", Value("paypal")}});
      case 1: {
        std::string last_four = std::to_string(1000 + rng.below(9000));
        return Value(Value::Map{{"id", Value("credit_card_" + std::to_string(++card_n))},
                                {"source", Value("credit_card")},
                                {"last_four", Value(last_four)}});
      }
      default:
        return Value(Value::Map{
            {"id", Value("gift_card_" + std::to_string(++gift_n))},
            {"source", Value("gift_card")},
            {"balance", Value(dollars(1000 + static_cast<std::int64_t>(rng.below(19000))))}});
    }
  }

  std::vector<std::string> gen_users(int count) {
    std::vector<std::string> ids;
    std::set<std::string> taken;
    while (static_cast<int>(ids.size()) < count) {
      std::string first = rng.pick(kFirstNames);
      std::string last = rng.pick(kLastNames);
      std::string user_id =
          first + "_" + last + "_" + std::to_string(1000 + rng.below(9000));
      if (!taken.insert(user_id).second) continue;
      const auto& [city, zip] = kCities[rng.below(kCities.size())];
      Value::Map methods;
      std::uint64_t n = 2 + rng.below(2);
      for (std::uint64_t k = 0; k < n; ++k) {
        Value method = make_payment_method();
        methods[method.as_map().at("id").as_str()] = method;
      }
      state.tables["users"][user_id] = Value(Value::Map{
          {"user_id", Value(user_id)},
          {"name", Value(Value::Map{{"first_name", Value(capitalize(first))},
                                    {"last_name", Value(capitalize(last))}})},
          {"address",
           Value(Value::Map{{"street", Value(std::to_string(100 + rng.below(900)) + " " +
                                             rng.pick(kStreets))},
                            {"city", Value(std::string(city))},
                            {"zip", Value(std::string(zip))}})},
          {"email", Value(first + "." + last + std::to_string(ids.size()) +
                          "@example.com")},
          {"payment_methods", Value(std::move(methods))},
      });
      ids.push_back(user_id);
    }
    return ids;
  }

  void gen_order(int ordinal, const std::string& user_id, const std::string& status) {
    std::string order_id = "#W" + std::to_string(1001 + ordinal);
    const auto& products = state.tables["products"];
    Value::List items;
    std::set<std::string> used_products;
    std::int64_t total_cents = 0;
    std::uint64_t item_count = 1 + rng.below(3);
    while (items.size() < item_count) {
      auto pit = products.begin();
      std::advance(pit, static_cast<long>(rng.below(products.size())));
      if (!used_products.insert(pit->first).second) continue;
      const auto& product = pit->second.as_map();
      const auto& variants = product.at("variants").as_map();
      auto vit = variants.begin();
      std::advance(vit, static_cast<long>(rng.below(variants.size())));
      const auto& variant = vit->second.as_map();
      std::int64_t quantity = 1 + static_cast<std::int64_t>(rng.below(2));
      double price = variant.at("price").as_float();
      total_cents += static_cast<std::int64_t>(price * 100.0 + 0.5) * quantity;
      items.push_back(Value(Value::Map{
          {"item_id", variant.at("item_id")},
          {"product_id", product.at("product_id")},
          {"name", product.at("name")},
          {"options", variant.at("options")},
          {"price", variant.at("price")},
          {"quantity", Value(quantity)},
      }));
    }
    const auto& user = state.tables["users"].at(user_id).as_map();
    const auto& methods = user.at("payment_methods").as_map();
    auto mit = methods.begin();
    std::advance(mit, static_cast<long>(rng.below(methods.size())));
    const std::string& method_id = mit->first;

    Value::List history;
    history.push_back(Value(Value::Map{{"transaction_type", Value("payment")},
                                       {"amount", Value(dollars(total_cents))},
                                       {"payment_method_id", Value(method_id)}}));
    Value::Map order{
        {"order_id", Value(order_id)},
        {"user_id", Value(user_id)},
        {"status", Value(status)},
        {"items", Value(items)},
        {"fulfillments", Value(Value::List{})},
        {"payment_history", Value(std::move(history))},
    };
    if (status == "delivered") {
      Value::List item_ids;
      for (const Value& item : items) item_ids.push_back(item.as_map().at("item_id"));
      order["fulfillments"] = Value(Value::List{Value(Value::Map{
          {"tracking_id", Value("T" + std::to_string(100000 + rng.below(900000)))},
          {"item_ids", Value(std::move(item_ids))}})});
    }
    if (status == "cancelled") {
      order["payment_history"].as_list().push_back(
          Value(Value::Map{{"transaction_type", Value("refund")},
                           {"amount", Value(dollars(total_cents))},
                           {"payment_method_id", Value(method_id)}}));
    }
    state.tables["orders"][order_id] = Value(std::move(order));
  }

  void run(Scale scale) {
    int product_count = scale == Scale::Small ? 12 : 30;
    int user_count = scale == Scale::Small ? 10 : 100;
    int order_count = scale == Scale::Small ? 50 : 500;
    gen_products(product_count);
    std::vector<std::string> users = gen_users(user_count);
    int ordinal = 0;
    // Every user gets one delivered and one pending order, so return,
    // exchange, modify, and cancel templates always have a live target.
    for (const auto& user_id : users) {
      gen_order(ordinal++, user_id, "delivered");
      gen_order(ordinal++, user_id, "pending");
    }
    while (ordinal < order_count) {
      const std::string& user_id = users[rng.below(users.size())];
      std::uint64_t roll = rng.below(10);
      std::string status = roll < 3 ? "pending" : roll < 8 ? "delivered" : "cancelled";
      gen_order(ordinal++, user_id, status);
    }
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

const std::string& order_status(const Value::Map& order) {
  return order.at("status").as_str();
}

std::set<std::string> order_item_ids(const Value::Map& order) {
  std::set<std::string> ids;
  for (const Value& item : order.at("items").as_list()) {
    ids.insert(item.as_map().at("item_id").as_str());
  }
  return ids;
}

std::vector<std::string> str_list(const Value& v, const char* what) {
  std::vector<std::string> out;
  for (const Value& item : v.as_list()) {
    if (!item.is_str()) {
      throw ToolError(ToolError::Code::BadArgument,
                      std::string(what) + " must contain only strings");
    }
    out.push_back(item.as_str());
  }
  return out;
}

void require_payment_method(EnvState& state, const Value::Map& order,
                            const std::string& method_id) {
  const auto& user = fetch(state, "users", order.at("user_id").as_str(), "user");
  if (!user.at("payment_methods").as_map().count(method_id)) {
    throw ToolError(ToolError::Code::NotFound,
                    "payment method '" + method_id + "' not found for user");
  }
}

double order_total(const Value::Map& order) {
  std::int64_t cents = 0;
  for (const Value& item : order.at("items").as_list()) {
    const auto& m = item.as_map();
    cents += static_cast<std::int64_t>(m.at("price").as_float() * 100.0 + 0.5) *
             m.at("quantity").as_int();
  }
  return dollars(cents);
}

// Pairs each old item with a replacement variant of the same product.
void check_item_swap(EnvState& state, const Value::Map& order,
                     const std::vector<std::string>& item_ids,
                     const std::vector<std::string>& new_item_ids) {
  if (item_ids.size() != new_item_ids.size() || item_ids.empty()) {
    throw ToolError(ToolError::Code::BadArgument,
                    "item_ids and new_item_ids must pair up one-to-one");
  }
  std::set<std::string> owned = order_item_ids(order);
  for (std::size_t k = 0; k < item_ids.size(); ++k) {
    if (!owned.count(item_ids[k])) {
      throw ToolError(ToolError::Code::InvalidItem,
                      "item '" + item_ids[k] + "' is not part of the order");
    }
    std::string product_id;
    for (const Value& item : order.at("items").as_list()) {
      if (item.as_map().at("item_id").as_str() == item_ids[k]) {
        product_id = item.as_map().at("product_id").as_str();
      }
    }
    const auto& product = fetch(state, "products", product_id, "product");
    if (!product.at("variants").as_map().count(new_item_ids[k])) {
      throw ToolError(ToolError::Code::InvalidItem,
                      "item '" + new_item_ids[k] + "' is not a variant of " + product_id);
    }
  }
}

Value sorted_str_values(std::vector<std::string> ids) {
  std::sort(ids.begin(), ids.end());
  Value::List out;
  for (auto& id : ids) out.push_back(Value(std::move(id)));
  return Value(std::move(out));
}

ToolRegistry build_registry() {
  ToolRegistry reg;
  reg.add({"get_user_details",
           {{"user_id", "string", true}},
           "Look up a user record by user id.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(fetch(state, "users", args.at("user_id").as_str(), "user"));
          });
  reg.add({"get_order_details",
           {{"order_id", "string", true}},
           "Look up an order record by order id (format #W....).",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(fetch(state, "orders", args.at("order_id").as_str(), "order"));
          });
  reg.add({"get_product_details",
           {{"product_id", "string", true}},
           "Look up a product and its purchasable variants.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(
                fetch(state, "products", args.at("product_id").as_str(), "product"));
          });
  reg.add({"find_user_id_by_name_zip",
           {{"first_name", "string", true},
            {"last_name", "string", true},
            {"zip", "string", true}},
           "Find the user id matching a full name and zip code.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) -> Value {
            for (const auto& [user_id, record] : state.tables.at("users")) {
              const auto& user = record.as_map();
              const auto& name = user.at("name").as_map();
              if (name.at("first_name").as_str() == args.at("first_name").as_str() &&
                  name.at("last_name").as_str() == args.at("last_name").as_str() &&
                  user.at("address").as_map().at("zip").as_str() ==
                      args.at("zip").as_str()) {
                return Value(user_id);
              }
            }
            throw ToolError(ToolError::Code::NotFound,
                            "no user matches that name and zip");
          });
  reg.add({"cancel_order",
           {{"order_id", "string", true}},
           "Cancel a pending order and refund the original payment method.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& order =
                fetch(state, "orders", args.at("order_id").as_str(), "order");
            if (order_status(order) != "pending") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "only pending orders can be cancelled, status is '" +
                                  order_status(order) + "'");
            }
            order["status"] = Value("cancelled");
            const auto& first_payment =
                order.at("payment_history").as_list().front().as_map();
            order["payment_history"].as_list().push_back(Value(Value::Map{
                {"transaction_type", Value("refund")},
                {"amount", Value(order_total(order))},
                {"payment_method_id", first_payment.at("payment_method_id")}}));
            return Value(order);
          });
  reg.add({"return_delivered_order_items",
           {{"order_id", "string", true},
            {"item_ids", "list", true},
            {"payment_method_id", "string", true}},
           "File a return for items of a delivered order; the refund goes to "
           "the given payment method.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& order =
                fetch(state, "orders", args.at("order_id").as_str(), "order");
            if (order_status(order) != "delivered") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "only delivered orders can be returned, status is '" +
                                  order_status(order) + "'");
            }
            auto item_ids = str_list(args.at("item_ids"), "item_ids");
            if (item_ids.empty()) {
              throw ToolError(ToolError::Code::BadArgument, "item_ids is empty");
            }
            std::set<std::string> owned = order_item_ids(order);
            for (const auto& id : item_ids) {
              if (!owned.count(id)) {
                throw ToolError(ToolError::Code::InvalidItem,
                                "item '" + id + "' is not part of the order");
              }
            }
            require_payment_method(state, order, args.at("payment_method_id").as_str());
            order["status"] = Value("return requested");
            order["return_items"] = sorted_str_values(item_ids);
            order["return_payment_method_id"] = args.at("payment_method_id");
            return Value(order);
          });
  reg.add({"exchange_delivered_order_items",
           {{"order_id", "string", true},
            {"item_ids", "list", true},
            {"new_item_ids", "list", true},
            {"payment_method_id", "string", true}},
           "Exchange items of a delivered order for other variants of the "
           "same products; price differences use the given payment method.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& order =
                fetch(state, "orders", args.at("order_id").as_str(), "order");
            if (order_status(order) != "delivered") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "only delivered orders can be exchanged, status is '" +
                                  order_status(order) + "'");
            }
            auto item_ids = str_list(args.at("item_ids"), "item_ids");
            auto new_ids = str_list(args.at("new_item_ids"), "new_item_ids");
            check_item_swap(state, order, item_ids, new_ids);
            require_payment_method(state, order, args.at("payment_method_id").as_str());
            order["status"] = Value("exchange requested");
            order["exchange_items"] = sorted_str_values(item_ids);
            order["exchange_new_items"] = sorted_str_values(new_ids);
            order["exchange_payment_method_id"] = args.at("payment_method_id");
            return Value(order);
          });
  reg.add({"modify_pending_order_items",
           {{"order_id", "string", true},
            {"item_ids", "list", true},
            {"new_item_ids", "list", true},
            {"payment_method_id", "string", true}},
           "Swap items of a pending order for other variants of the same "
           "products before it ships.",
           true,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::Map& order =
                fetch(state, "orders", args.at("order_id").as_str(), "order");
            if (order_status(order) != "pending") {
              throw ToolError(ToolError::Code::IneligibleStatus,
                              "only pending orders can be modified, status is '" +
                                  order_status(order) + "'");
            }
            auto item_ids = str_list(args.at("item_ids"), "item_ids");
            auto new_ids = str_list(args.at("new_item_ids"), "new_item_ids");
            check_item_swap(state, order, item_ids, new_ids);
            require_payment_method(state, order, args.at("payment_method_id").as_str());
            for (std::size_t k = 0; k < item_ids.size(); ++k) {
              for (Value& item : order.at("items").as_list()) {
                auto& m = item.as_map();
                if (m.at("item_id").as_str() != item_ids[k]) continue;
                const auto& product =
                    fetch(state, "products", m.at("product_id").as_str(), "product");
                const auto& variant =
                    product.at("variants").as_map().at(new_ids[k]).as_map();
                m["item_id"] = variant.at("item_id");
                m["options"] = variant.at("options");
                m["price"] = variant.at("price");
              }
            }
            order["modify_payment_method_id"] = args.at("payment_method_id");
            return Value(order);
          });
  reg.add({"list_user_ids", {}, "List every user id in the database.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("users")) {
              out.push_back(Value(id));
            }
            return Value(std::move(out));
          });
  reg.add({"list_order_ids", {}, "List every order id in the database.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("orders")) {
              out.push_back(Value(id));
            }
            return Value(std::move(out));
          });
  return reg;
}

class RetailEnv : public Environment {
 public:
  explicit RetailEnv(Scale scale) : scale_(scale), registry_(build_registry()) {}

  std::string name() const override { return "retail"; }

  EnvState reset(std::uint64_t seed) const override {
    Generator gen(seed);
    gen.run(scale_);
    return std::move(gen.state);
  }

  const env::ToolRegistry& tools() const override { return registry_; }

  std::string description() const override {
    return "Retail customer service desk. Users own orders; pending orders "
           "can be modified or cancelled, delivered orders can have items "
           "returned or exchanged. Success is judged by the resulting order "
           "state, not by what is said.";
  }

  bool answer_mode() const override { return false; }

 private:
  Scale scale_;
  env::ToolRegistry registry_;
};

}  // namespace

std::unique_ptr<Environment> make_retail_env(Scale scale) {
  return std::make_unique<RetailEnv>(scale);
}

}  // namespace catforge::envs
