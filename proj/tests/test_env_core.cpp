#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>
#include <string>
#include <vector>

#include "catforge/env/episode.hpp"
#include "catforge/env/state.hpp"
#include "catforge/envs/suite.hpp"
#include "doctest.h"

using catforge::ctl::Value;
namespace env = catforge::env;
namespace envs = catforge::envs;

namespace {

env::EnvState make_state() {
  env::EnvState state;
  state.rng_seed = 99;
  state.tables["pets"]["rex"] = Value(Value::Map{
      {"name", Value("rex")}, {"kind", Value("dog")}, {"age", Value(std::int64_t{4})}});
  state.tables["pets"]["mia"] = Value(Value::Map{
      {"name", Value("mia")}, {"kind", Value("cat")}, {"age", Value(std::int64_t{2})}});
  return state;
}

// Minimal environment with one read-only, one mutating, one failing, and
// one hidden tool; gives exact control over digests and step budgets.
class CounterEnv : public env::Environment {
 public:
  CounterEnv() {
    reg_.add({"peek", {}, "Read the counter.", false, false},
             [](env::EnvState& s, const Value::Map&) {
               return s.tables.at("counter").at("c").as_map().at("value");
             });
    reg_.add({"bump", {}, "Increment the counter.", true, false},
             [](env::EnvState& s, const Value::Map&) {
               auto& rec = s.tables.at("counter").at("c").as_map();
               rec["value"] = Value(rec.at("value").as_int() + 1);
               return rec.at("value");
             });
    reg_.add({"fail", {{"code", "string", true}}, "Throw the named error.", false, false},
             [](env::EnvState&, const Value::Map& args) -> Value {
               const std::string& code = args.at("code").as_str();
               if (code == "NotFound") {
                 throw env::ToolError(env::ToolError::Code::NotFound, "nothing here");
               }
               if (code == "IneligibleStatus") {
                 throw env::ToolError(env::ToolError::Code::IneligibleStatus, "wrong state");
               }
               if (code == "InvalidItem") {
                 throw env::ToolError(env::ToolError::Code::InvalidItem, "bad item");
               }
               throw env::ToolError(env::ToolError::Code::BadArgument, "bad argument");
             });
    reg_.add({"secret", {}, "Hidden probe.", false, true},
             [](env::EnvState&, const Value::Map&) { return Value(std::int64_t{42}); });
  }

  std::string name() const override { return "counter"; }

  env::EnvState reset(std::uint64_t seed) const override {
    env::EnvState state;
    state.rng_seed = seed;
    state.tables["counter"]["c"] =
        Value(Value::Map{{"value", Value(std::int64_t{0})}});
    return state;
  }

  const env::ToolRegistry& tools() const override { return reg_; }
  std::string description() const override { return "A counter."; }
  bool answer_mode() const override { return false; }

 private:
  env::ToolRegistry reg_;
};

env::Observation run(const env::Environment& e, env::EnvState& s, const std::string& src,
                     const env::EpisodeConfig& cfg = {}) {
  return env::apply_action(e, s, env::CodeAction{src}, cfg);
}

std::string find_order_with_status(const env::EnvState& s, const std::string& status) {
  for (const auto& [id, rec] : s.tables.at("orders")) {
    if (rec.as_map().at("status").as_str() == status) return id;
  }
  return "";
}

std::string first_payment_method_of_order(const env::EnvState& s, const std::string& order_id) {
  const auto& order = s.tables.at("orders").at(order_id).as_map();
  const auto& user = s.tables.at("users").at(order.at("user_id").as_str()).as_map();
  return user.at("payment_methods").as_map().begin()->first;
}

std::string quoted_item_list(const env::EnvState& s, const std::string& order_id) {
  const auto& order = s.tables.at("orders").at(order_id).as_map();
  std::string out = "[";
  bool first = true;
  for (const Value& item : order.at("items").as_list()) {
    if (!first) out += ", ";
    first = false;
    out += "\"" + item.as_map().at("item_id").as_str() + "\"";
  }
  return out + "]";
}

}  // namespace

TEST_CASE("digest covers tables and seed, not bookkeeping") {
  env::EnvState a = make_state();
  std::string d0 = digest(a);
  CHECK(d0.size() == 64);
  CHECK(d0.find_first_not_of("0123456789abcdef") == std::string::npos);

  a.step_count = 7;
  env::log_event(a, "note", "hello");
  CHECK(digest(a) == d0);

  env::EnvState b = make_state();
  b.tables["pets"]["rex"].as_map()["age"] = Value(std::int64_t{5});
  CHECK(digest(b) != d0);

  env::EnvState c = make_state();
  c.rng_seed = 100;
  CHECK(digest(c) != d0);

  CHECK(digest(make_state()) == d0);
}

TEST_CASE("snapshot round-trips the full state") {
  env::EnvState state = make_state();
  state.step_count = 3;
  env::log_event(state, "action_code", "peek()");
  env::log_event(state, "tool_result", "0");

  std::string bytes = env::snapshot(state);
  CHECK(bytes.rfind("CATFORGE-ENV v1\n", 0) == 0);

  env::EnvState back = env::restore(bytes);
  CHECK(digest(back) == digest(state));
  CHECK(back.step_count == 3);
  CHECK(back.rng_seed == 99);
  REQUIRE(back.episode_log.size() == 2);
  CHECK(back.episode_log[0].as_map().at("kind").as_str() == "action_code");
  CHECK(back.episode_log[1].as_map().at("text").as_str() == "0");
  CHECK(back.tables.at("pets").at("mia") == state.tables.at("pets").at("mia"));
}

TEST_CASE("restore rejects corrupt snapshots") {
  env::EnvState state = make_state();
  std::string good = env::snapshot(state);

  CHECK_THROWS_AS(env::restore(""), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore("BOGUS v1\n{}"), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore("CATFORGE-ENV v2\n{}"), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore("CATFORGE-ENV v1\n{not json"), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore("CATFORGE-ENV v1\n[1, 2]"), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore("CATFORGE-ENV v1\n{\"rng_seed\": 1}"), env::CorruptSnapshot);
  CHECK_THROWS_AS(env::restore(good.substr(0, good.size() / 2)), env::CorruptSnapshot);

  try {
    env::restore("CATFORGE-ENV v2\n{}");
    CHECK(false);
  } catch (const env::CorruptSnapshot& e) {
    CHECK(std::string(e.what()).rfind("CorruptSnapshot: ", 0) == 0);
  }
}

TEST_CASE("record helpers") {
  env::EnvState state = make_state();
  CHECK(env::has_record(state, "pets", "rex"));
  CHECK_FALSE(env::has_record(state, "pets", "zzz"));
  CHECK_FALSE(env::has_record(state, "cars", "rex"));
  CHECK(env::get_record(state, "pets", "rex").as_map().at("kind").as_str() == "dog");
  CHECK_THROWS_AS(env::get_record(state, "pets", "zzz"), std::out_of_range);
}

TEST_CASE("apply_action runs code and reports results") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);
  std::string d0 = digest(state);

  env::Observation obs = run(ce, state, "return 1 + 1");
  CHECK(obs.kind == env::Observation::Kind::ToolResult);
  CHECK(obs.text() == "2");
  CHECK(state.step_count == 1);
  // Pure computation leaves the world digest untouched.
  CHECK(digest(state) == d0);

  // Bare tool-call script: observation shows the last tool's response.
  obs = run(ce, state, "peek()");
  CHECK(obs.kind == env::Observation::Kind::ToolResult);
  CHECK(obs.text() == "0");
  CHECK(digest(state) == d0);

  obs = run(ce, state, "bump()");
  CHECK(obs.kind == env::Observation::Kind::ToolResult);
  CHECK(obs.text() == "1");
  CHECK(digest(state) != d0);

  obs = run(ce, state, "x = peek()\nresult = x * 10");
  CHECK(obs.text() == "10");
  CHECK(state.step_count == 4);
}

TEST_CASE("apply_action surfaces errors as observations") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);

  env::Observation obs = run(ce, state, "unknown_tool()");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("UnknownTool") != std::string::npos);

  obs = run(ce, state, "return 1 +");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("SyntaxError") != std::string::npos);

  obs = run(ce, state, "return 1 / 0");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("DivByZero") != std::string::npos);

  // Tool error codes survive into the observation with their mapped kind.
  obs = run(ce, state, "fail(code=\"NotFound\")");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("NotFound") != std::string::npos);
  CHECK(obs.text().find("KeyMissing") != std::string::npos);

  obs = run(ce, state, "fail(code=\"IneligibleStatus\")");
  CHECK(obs.text().find("IneligibleStatus") != std::string::npos);
  CHECK(obs.text().find("TypeMismatch") != std::string::npos);

  obs = run(ce, state, "fail(code=\"InvalidItem\")");
  CHECK(obs.text().find("KeyMissing") != std::string::npos);

  obs = run(ce, state, "fail(code=\"BadArgument\")");
  CHECK(obs.text().find("TypeMismatch") != std::string::npos);

  // Errors consumed steps but never aborted the episode.
  CHECK(state.step_count == 7);
}

TEST_CASE("message actions go through the user simulator") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);

  env::Observation obs =
      env::apply_action(ce, state, env::MessageAction{"hello?"}, {});
  CHECK(obs.kind == env::Observation::Kind::UserMessage);
  CHECK(obs.text() == "###STOP###");

  std::string seen;
  env::UserSim sim = [&](const std::string& msg, env::EnvState&) {
    seen = msg;
    return std::string("please cancel order #W1001");
  };
  obs = env::apply_action(ce, state, env::MessageAction{"which order?"}, {}, sim);
  CHECK(seen == "which order?");
  CHECK(obs.text() == "please cancel order #W1001");
  CHECK(state.step_count == 2);
}

TEST_CASE("episode budget: 15 actions pass, the 16th throws") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);
  env::EpisodeConfig cfg;
  CHECK(cfg.max_steps == 15);

  for (int k = 0; k < 15; ++k) {
    CHECK_NOTHROW(run(ce, state, "peek()", cfg));
  }
  CHECK(state.step_count == 15);
  CHECK_THROWS_AS(run(ce, state, "peek()", cfg), env::EpisodeExhausted);
  CHECK(state.step_count == 15);

  env::EpisodeConfig tight;
  tight.max_steps = 2;
  env::EnvState s2 = ce.reset(1);
  run(ce, s2, "peek()", tight);
  run(ce, s2, "peek()", tight);
  CHECK_THROWS_AS(run(ce, s2, "peek()", tight), env::EpisodeExhausted);
}

TEST_CASE("episode log records actions and observations") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);
  run(ce, state, "bump()");
  env::apply_action(ce, state, env::MessageAction{"hi"}, {});

  REQUIRE(state.episode_log.size() == 4);
  CHECK(state.episode_log[0].as_map().at("kind").as_str() == "action_code");
  CHECK(state.episode_log[0].as_map().at("text").as_str() == "bump()");
  CHECK(state.episode_log[1].as_map().at("kind").as_str() == "tool_result");
  CHECK(state.episode_log[2].as_map().at("kind").as_str() == "action_message");
  CHECK(state.episode_log[3].as_map().at("kind").as_str() == "user_message");
}

TEST_CASE("hidden tools are invisible to the executor") {
  auto retail = envs::make_environment(envs::EnvKind::Retail);
  std::string executor_docs =
      env::render_tool_docs(retail->tools(), env::EpisodeMode::Executor);
  std::string challenger_docs =
      env::render_tool_docs(retail->tools(), env::EpisodeMode::Challenger);

  CHECK(executor_docs.find("list_user_ids") == std::string::npos);
  CHECK(executor_docs.find("list_order_ids") == std::string::npos);
  CHECK(executor_docs.find("get_order_details") != std::string::npos);
  CHECK(challenger_docs.find("list_user_ids") != std::string::npos);
  CHECK(challenger_docs.find("list_order_ids") != std::string::npos);

  env::EnvState state = retail->reset(5);
  env::Observation obs = run(*retail, state, "return list_user_ids()");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("UnknownTool") != std::string::npos);

  env::EpisodeConfig challenger;
  challenger.mode = env::EpisodeMode::Challenger;
  obs = run(*retail, state, "return len(list_user_ids())", challenger);
  CHECK(obs.kind == env::Observation::Kind::ToolResult);
  CHECK(std::stol(obs.text()) > 0);

  CounterEnv ce;
  std::string ce_docs = env::render_tool_docs(ce.tools(), env::EpisodeMode::Executor);
  CHECK(ce_docs.find("secret") == std::string::npos);
  CHECK(ce_docs.find("peek() [read-only]: Read the counter.") != std::string::npos);
  CHECK(ce_docs.find("bump() [mutates]") != std::string::npos);
  CHECK(ce_docs.find("fail(code: string)") != std::string::npos);
}

TEST_CASE("read-only retail tools never change the digest") {
  auto retail = envs::make_environment(envs::EnvKind::Retail);
  for (std::uint64_t seed : {11ULL, 22ULL, 33ULL, 44ULL, 55ULL}) {
    env::EnvState state = retail->reset(seed);
    std::string d0 = digest(state);
    std::string order_id = find_order_with_status(state, "delivered");
    REQUIRE_FALSE(order_id.empty());
    const auto& order = state.tables.at("orders").at(order_id).as_map();
    const std::string& user_id = order.at("user_id").as_str();
    const auto& user = state.tables.at("users").at(user_id).as_map();

    run(*retail, state, "get_order_details(order_id=\"" + order_id + "\")");
    run(*retail, state, "get_user_details(user_id=\"" + user_id + "\")");
    run(*retail, state,
        "get_product_details(product_id=\"" +
            order.at("items").as_list()[0].as_map().at("product_id").as_str() + "\")");
    env::Observation found = run(
        *retail, state,
        "return find_user_id_by_name_zip(first_name=\"" +
            user.at("name").as_map().at("first_name").as_str() + "\", last_name=\"" +
            user.at("name").as_map().at("last_name").as_str() + "\", zip=\"" +
            user.at("address").as_map().at("zip").as_str() + "\")");
    CHECK(found.kind == env::Observation::Kind::ToolResult);
    CHECK(found.text() == user_id);
    CHECK(digest(state) == d0);
  }
}

TEST_CASE("snapshot makes mutations exactly invertible") {
  auto retail = envs::make_environment(envs::EnvKind::Retail);
  env::EnvState state = retail->reset(21);
  std::string d0 = digest(state);
  std::string bytes = env::snapshot(state);

  std::string pending = find_order_with_status(state, "pending");
  REQUIRE_FALSE(pending.empty());
  env::Observation obs = run(*retail, state, "cancel_order(order_id=\"" + pending + "\")");
  CHECK(obs.kind == env::Observation::Kind::ToolResult);
  CHECK(digest(state) != d0);
  CHECK(state.tables.at("orders").at(pending).as_map().at("status").as_str() ==
        "cancelled");

  state = env::restore(bytes);
  CHECK(digest(state) == d0);
  CHECK(state.tables.at("orders").at(pending).as_map().at("status").as_str() == "pending");
}

TEST_CASE("replay after restore reproduces the digest") {
  auto retail = envs::make_environment(envs::EnvKind::Retail);
  env::EnvState state = retail->reset(8);
  std::string bytes = env::snapshot(state);

  // Three mutating calls: two cancellations and one return.
  std::vector<std::string> pendings;
  for (const auto& [id, rec] : state.tables.at("orders")) {
    if (rec.as_map().at("status").as_str() == "pending") pendings.push_back(id);
    if (pendings.size() == 2) break;
  }
  REQUIRE(pendings.size() == 2);
  std::string delivered = find_order_with_status(state, "delivered");
  REQUIRE_FALSE(delivered.empty());

  std::vector<std::string> script = {
      "cancel_order(order_id=\"" + pendings[0] + "\")",
      "cancel_order(order_id=\"" + pendings[1] + "\")",
      "return_delivered_order_items(order_id=\"" + delivered + "\", item_ids=" +
          quoted_item_list(state, delivered) + ", payment_method_id=\"" +
          first_payment_method_of_order(state, delivered) + "\")",
  };

  for (const std::string& src : script) {
    env::Observation obs = run(*retail, state, src);
    CHECK(obs.kind == env::Observation::Kind::ToolResult);
  }
  std::string d1 = digest(state);

  env::EnvState replayed = env::restore(bytes);
  for (const std::string& src : script) {
    env::Observation obs = run(*retail, replayed, src);
    CHECK(obs.kind == env::Observation::Kind::ToolResult);
  }
  CHECK(digest(replayed) == d1);
}

TEST_CASE("per-action tool-call limit still applies inside episodes") {
  CounterEnv ce;
  env::EnvState state = ce.reset(1);
  env::Observation obs = run(ce, state,
                             "for i in [1, 2, 3] {\n"
                             "  for j in [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, "
                             "15, 16, 17, 18, 19, 20, 21, 22] {\n"
                             "    peek()\n"
                             "  }\n"
                             "}");
  CHECK(obs.kind == env::Observation::Kind::ToolError);
  CHECK(obs.text().find("LimitExceeded") != std::string::npos);
}
