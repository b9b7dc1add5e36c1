#include "catforge/rollout/challenger.hpp"

#include <sstream>

#include "json.hpp"

#include "catforge/ctl/value.hpp"
#include "catforge/util/parallel.hpp"
#include "catforge/util/rng.hpp"

namespace catforge::rollout {

namespace {

using nlohmann::json;

// CTL string literal with escaping.
std::string q(const std::string& s) { return ctl::render(ctl::Value(s)); }

std::vector<std::string> tool_results(const Transcript& transcript) {
  std::vector<std::string> out;
  const std::string prefix = "[tool_result] ";
  for (const auto& entry : transcript) {
    if (entry.role == "user" && entry.content.rfind(prefix, 0) == 0) {
      out.push_back(entry.content.substr(prefix.size()));
    }
  }
  return out;
}

PolicyStep code(std::string src) { return {PolicyStep::Kind::Code, std::move(src)}; }
PolicyStep answer(std::string text) { return {PolicyStep::Kind::Answer, std::move(text)}; }

std::string tag(const std::string& name, const std::string& body) {
  return "<" + name + ">\n" + body + "\n</" + name + ">\n";
}

std::string bundle_answer(const std::string& instruction, const std::string& verify,
                          const std::string& solution,
                          const std::vector<std::string>& failures) {
  std::string out = tag("instruction", instruction) + tag("evaluation_function", verify) +
                    tag("solution", solution);
  for (const auto& f : failures) out += tag("failure_case", f);
  return out;
}

std::string retail_answer(const json& order, const json& user) {
  const std::string order_id = order.at("order_id").get<std::string>();
  const std::string user_id = order.at("user_id").get<std::string>();
  const std::string status = order.at("status").get<std::string>();
  const std::string method =
      order.at("payment_history").at(0).at("payment_method_id").get<std::string>();

  std::vector<std::string> item_ids;
  for (const auto& item : order.at("items")) {
    item_ids.push_back(item.at("item_id").get<std::string>());
  }
  std::string item_list = "[";
  for (std::size_t i = 0; i < item_ids.size(); ++i) {
    if (i) item_list += ", ";
    item_list += q(item_ids[i]);
  }
  item_list += "]";

  if (status == "delivered") {
    const std::size_t n = item_ids.size();
    std::ostringstream ins;
    ins << "I am " << user_id << ". Every item in my delivered order " << order_id
        << " arrived damaged. Please return all " << n
        << " item(s) and refund them to my payment method " << method << ".";
    std::ostringstream ver;
    ver << "o = get_order_details(order_id=" << q(order_id) << ")\n"
        << "return o[\"status\"] == \"return requested\" and o[\"return_payment_method_id\"] == "
        << q(method) << " and len(o[\"return_items\"]) == " << n;
    const std::string sol = "return_delivered_order_items(order_id=" + q(order_id) +
                            ", item_ids=" + item_list + ", payment_method_id=" + q(method) + ")";
    std::string wrong_method;
    for (const auto& [m, record] : user.at("payment_methods").items()) {
      if (m != method) {
        wrong_method = m;
        break;
      }
    }
    std::vector<std::string> failures;
    failures.push_back("noop = 1");
    failures.push_back("cancel_order(order_id=" + q(order_id) + ")");
    if (n >= 2) {
      failures.push_back("return_delivered_order_items(order_id=" + q(order_id) +
                         ", item_ids=[" + q(item_ids[0]) + "], payment_method_id=" + q(method) +
                         ")");
    } else if (!wrong_method.empty()) {
      failures.push_back("return_delivered_order_items(order_id=" + q(order_id) +
                         ", item_ids=" + item_list + ", payment_method_id=" + q(wrong_method) +
                         ")");
    } else {
      failures.push_back("peek = get_order_details(order_id=" + q(order_id) + ")");
    }
    return bundle_answer(ins.str(), ver.str(), sol, failures);
  }

  // Pending order: cancellation task.
  std::ostringstream ins;
  ins << "I am " << user_id << ". Please cancel my pending order " << order_id
      << "; I no longer need it.";
  std::ostringstream ver;
  ver << "o = get_order_details(order_id=" << q(order_id) << ")\n"
      << "return o[\"status\"] == \"cancelled\" and len(o[\"payment_history\"]) == 2";
  const std::string sol = "cancel_order(order_id=" + q(order_id) + ")";
  const std::vector<std::string> failures = {
      "noop = 1",
      "return_delivered_order_items(order_id=" + q(order_id) + ", item_ids=[" + q(item_ids[0]) +
          "], payment_method_id=" + q(method) + ")",
      "exchange_delivered_order_items(order_id=" + q(order_id) + ", item_ids=[" +
          q(item_ids[0]) + "], new_item_ids=[" + q(item_ids[0]) + "], payment_method_id=" +
          q(method) + ")",
  };
  return bundle_answer(ins.str(), ver.str(), sol, failures);
}

std::string airline_answer(const json& reservation) {
  const std::string rid = reservation.at("reservation_id").get<std::string>();
  const std::string user_id = reservation.at("user_id").get<std::string>();
  const json& leg = reservation.at("flights").at(0);

  std::ostringstream ins;
  ins << "I am " << user_id << ". The trip is off; please cancel my reservation " << rid
      << " entirely.";
  std::ostringstream ver;
  ver << "r = get_reservation_details(reservation_id=" << q(rid) << ")\n"
      << "return r[\"status\"] == \"cancelled\" and len(r[\"payment_history\"]) == 2";
  const std::string sol = "cancel_reservation(reservation_id=" + q(rid) + ")";
  const std::vector<std::string> failures = {
      "noop = 1",
      "peek = get_reservation_details(reservation_id=" + q(rid) + ")",
      "search_direct_flight(origin=" + q(leg.at("origin").get<std::string>()) +
          ", destination=" + q(leg.at("destination").get<std::string>()) + ", date=" +
          q(leg.at("date").get<std::string>()) + ")",
  };
  return bundle_answer(ins.str(), ver.str(), sol, failures);
}

std::string fact_solution(const json& fact) {
  const std::string domain = fact.value("domain", "");
  if (domain == "travel") {
    std::ostringstream sol;
    sol << "flights = find_flights(origin=" << q(fact.at("origin").get<std::string>())
        << ", destination=" << q(fact.at("destination").get<std::string>()) << ")\n"
        << "price = 0.0\n"
        << "for f in flights {\n"
        << "  if f[\"flight_id\"] == " << q(fact.at("flight_id").get<std::string>()) << " {\n"
        << "    price = f[\"price\"]\n"
        << "  }\n"
        << "}\n"
        << "hotels = find_hotels(city=" << q(fact.at("destination").get<std::string>()) << ")\n"
        << "nightly = 0.0\n"
        << "for h in hotels {\n"
        << "  if h[\"hotel_id\"] == " << q(fact.at("hotel_id").get<std::string>()) << " {\n"
        << "    nightly = h[\"price_per_night\"]\n"
        << "  }\n"
        << "}\n"
        << "return budget_calculator(flight_price=price, hotel_price_per_night=nightly, "
           "num_nights=" << fact.at("nights").get<std::int64_t>() << ")";
    return sol.str();
  }
  if (domain == "dna") {
    return "return " + fact.at("op").get<std::string>() + "(sequence=" +
           q(fact.at("sequence").get<std::string>()) + ")";
  }
  if (domain == "decoder") {
    return "return caesar_decode(text=reverse_string(text=hex_decode(text=" +
           q(fact.at("wire").get<std::string>()) + ")), shift=" +
           std::to_string(fact.at("shift").get<std::int64_t>()) + ")";
  }
  if (domain == "trade") {
    return "price = get_stock_price(symbol=" + q(fact.at("symbol").get<std::string>()) +
           ")\nreturn price * " + std::to_string(fact.at("shares").get<std::int64_t>());
  }
  // Web: visit the page that carries the fact, then give the answer.
  return "page = open_page(page_id=" + q(fact.at("page_id").get<std::string>()) +
         ")\nreturn " + q(fact.at("expected").get<std::string>());
}

std::string fact_answer(const json& fact) {
  const std::string instruction =
      fact.at("question").get<std::string>() + " Reply with only the answer.";
  const std::string verify = "return match_answer(answer=answer, expected=" +
                             q(fact.at("expected").get<std::string>()) + ", mode=" +
                             q(fact.at("mode").get<std::string>()) + ")";
  const std::vector<std::string> failures = {
      "return \"###wrong###\"",
      "noop = 1",
      "return \"999999999\"",
  };
  return bundle_answer(instruction, verify, fact_solution(fact), failures);
}

}  // namespace

PolicyStep TemplateChallengerPolicy::next_action(const Transcript& transcript) {
  const std::vector<std::string> obs = tool_results(transcript);
  if (obs.empty()) {
    const char* lister = kind_ == envs::EnvKind::Retail      ? "list_order_ids"
                         : kind_ == envs::EnvKind::Airline   ? "list_reservation_ids"
                                                             : "list_facts";
    return code("return " + std::string(lister) + "()");
  }

  const json ids = json::parse(obs[0]);
  const auto pick = [&](std::uint64_t salt) {
    return ids.at(util::derive_seed(seed_, salt) % ids.size()).get<std::string>();
  };

  if (kind_ == envs::EnvKind::Airline) {
    if (obs.size() == 1) {
      return code("return get_reservation_details(reservation_id=" + q(pick(1)) + ")");
    }
    return answer(airline_answer(json::parse(obs.back())));
  }

  if (kind_ == envs::EnvKind::Calculation || kind_ == envs::EnvKind::Web) {
    if (obs.size() == 1) {
      return code("return get_fact(fact_id=" + q(pick(1)) + ")");
    }
    return answer(fact_answer(json::parse(obs.back())));
  }

  // Retail: walk orders from a seeded start until one is deliverable or
  // pending, then look up its owner for payment-method details.
  const std::size_t start = util::derive_seed(seed_, 1) % ids.size();
  json order;
  std::size_t fetched = 0;
  for (std::size_t i = 1; i < obs.size(); ++i) {
    const json parsed = json::parse(obs[i]);
    if (!parsed.is_object()) continue;
    if (parsed.contains("items")) {
      order = parsed;
      ++fetched;
    } else if (parsed.contains("payment_methods")) {
      return answer(retail_answer(order, parsed));
    }
  }
  if (order.is_null() || (order.at("status") != "delivered" && order.at("status") != "pending")) {
    const std::size_t idx = (start + fetched) % ids.size();
    return code("return get_order_details(order_id=" + q(ids.at(idx).get<std::string>()) + ")");
  }
  return code("return get_user_details(user_id=" +
              q(order.at("user_id").get<std::string>()) + ")");
}

CatBundle generate_template_bundle(envs::EnvKind kind, std::uint64_t seed, envs::Scale scale) {
  TemplateChallengerPolicy policy(kind, seed);
  return run_challenger_episode(kind, policy, seed, scale);
}

std::vector<CatBundle> generate_template_batch(envs::EnvKind kind, int n, std::uint64_t seed,
                                               envs::Scale scale, int workers) {
  std::vector<CatBundle> bundles(static_cast<std::size_t>(n));
  util::parallel_for(static_cast<std::size_t>(n),
                     static_cast<unsigned>(workers < 1 ? 1 : workers), [&](std::size_t i) {
                       std::uint64_t s = util::derive_seed(seed, i);
                       for (int attempt = 0;; ++attempt) {
                         try {
                           bundles[i] = generate_template_bundle(kind, s, scale);
                           break;
                         } catch (const std::runtime_error&) {
                           if (attempt >= 3) throw;
                           s = util::derive_seed(s, 0x7e7eULL);
                         }
                       }
                       bundles[i].metadata["task_id"] =
                           std::string(envs::to_string(kind)) + "-" + std::to_string(i);
                     });
  return bundles;
}

NoisyBatch generate_noisy_batch(envs::EnvKind kind, int n, std::uint64_t seed,
                                double flaw_fraction, envs::Scale scale, int workers) {
  NoisyBatch out;
  out.bundles = generate_template_batch(kind, n, seed, scale, workers);

  const int per_class = static_cast<int>(n * flaw_fraction);
  std::vector<std::string> labels(static_cast<std::size_t>(n), "clean");
  int at = 0;
  for (const char* label : {"unrunnable_verifier", "infeasible_solution", "lenient_verifier"}) {
    for (int i = 0; i < per_class; ++i) labels[static_cast<std::size_t>(at++)] = label;
  }
  util::Rng rng(util::derive_seed(seed, 0xf1a3ULL));
  rng.shuffle(labels);

  for (std::size_t i = 0; i < labels.size(); ++i) {
    CatBundle& b = out.bundles[i];
    const std::string& label = labels[i];
    if (label == "unrunnable_verifier") {
      // Undefined variable: the verifier errors on every evaluation.
      b.verify = "ghost = missing_variable_zz\n" + b.verify;
    } else if (label == "infeasible_solution") {
      switch (kind) {
        case envs::EnvKind::Retail:
          b.solution = "cancel_order(order_id=\"#W000001\")";
          break;
        case envs::EnvKind::Airline:
          b.solution = "cancel_reservation(reservation_id=\"#NOPE#\")";
          break;
        default:
          b.solution = "return \"###impossible###\"";
          break;
      }
    } else if (label == "lenient_verifier") {
      b.verify = "return true";
    }
    b.metadata["planted_flaw"] = label;
    out.planted[label] += 1;
  }
  for (const char* label : {"clean", "unrunnable_verifier", "infeasible_solution",
                            "lenient_verifier"}) {
    out.planted.emplace(label, 0);
  }
  return out;
}

std::vector<CatBundle> generate_noop_airline_batch(int n, std::uint64_t seed,
                                                   envs::Scale scale) {
  std::vector<CatBundle> bundles;
  bundles.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::uint64_t world_seed = util::derive_seed(util::derive_seed(seed, 0xa0ULL), i);
    const env::EnvState state = envs::generate_world(envs::EnvKind::Airline, world_seed, scale);
    const auto& reservations = state.tables.at("reservations");
    std::vector<std::string> rids;
    rids.reserve(reservations.size());
    for (const auto& [rid, record] : reservations) rids.push_back(rid);
    util::Rng rng(util::derive_seed(world_seed, 2));
    const std::string rid = rng.pick(rids);
    const std::string user_id = reservations.at(rid).as_map().at("user_id").as_str();

    CatBundle b;
    b.instruction = "I am " + user_id + ". Please make sure my reservation " + rid +
                    " is still active.";
    b.verify = "r = get_reservation_details(reservation_id=" + q(rid) +
               ")\nreturn r[\"status\"] == \"active\"";
    b.solution = "peek = get_reservation_details(reservation_id=" + q(rid) + ")";
    b.failures = {"a = 1", "b = 2", "c = 3"};
    b.env_kind = envs::EnvKind::Airline;
    b.base_seed = world_seed;
    b.metadata["scale"] = envs::to_string(scale);
    b.metadata["challenger"] = "noop_template";
    b.metadata["task_id"] = "airline-noop-" + std::to_string(i);
    bundles.push_back(std::move(b));
  }
  return bundles;
}

}  // namespace catforge::rollout
