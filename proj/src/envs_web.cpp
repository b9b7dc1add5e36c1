#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "catforge/util/rng.hpp"
#include "envs_internal.hpp"

namespace catforge::envs {

namespace {

using env::ToolError;
using env::ToolRegistry;

constexpr std::array<const char*, 12> kTopics = {
    "Shipping Overview",   "Launch Archive",     "Observatory Notes",
    "Harbor Schedule",     "Warehouse Ledger",   "Expedition Log",
    "Signal Tower Manual", "Greenhouse Records", "Foundry Report",
    "Cartography Index",   "Reservoir Survey",   "Archive Annex"};

constexpr std::array<const char*, 6> kFiller = {
    "Routine inspections continue on the usual cadence.",
    "Staff rotations were posted at the start of the month.",
    "No incidents were reported during the last review.",
    "Supply levels remain within the expected band.",
    "The committee deferred two proposals to next quarter.",
    "Visitors must sign the register at the front desk."};

constexpr std::array<const char*, 8> kCodeWords = {
    "ZEBRA", "ONYX", "MARLIN", "TALON", "EMBER", "COBALT", "SPRUCE", "GLACIER"};

constexpr std::array<const char*, 8> kPlaces = {
    "Northgate", "Eastmoor", "Seaview", "Redford",
    "Larkspur",  "Millbrook", "Ashworth", "Dunmore"};

const Value::Map& fetch_page(const EnvState& state, const std::string& page_id) {
  auto tit = state.tables.find("pages");
  if (tit == state.tables.end() || !tit->second.count(page_id)) {
    throw ToolError(ToolError::Code::NotFound, "page '" + page_id + "' not found");
  }
  return tit->second.at(page_id).as_map();
}

bool contains_fold(const std::string& haystack, const std::string& needle) {
  if (needle.empty()) return true;
  auto fold = [](const std::string& s) {
    std::string out;
    for (char c : s) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  return fold(haystack).find(fold(needle)) != std::string::npos;
}

struct Generator {
  util::Rng rng;
  EnvState state;
  int fact_n = 0;
  std::vector<std::string> ids;
  std::vector<std::string> bodies;
  std::vector<Value::List> links;

  explicit Generator(std::uint64_t seed) : rng(util::derive_seed(seed, 0x776562ULL)) {
    state.rng_seed = seed;
  }

  // The page id rides along so challengers can point solutions at the page
  // holding the answer.
  void add_fact(std::size_t page, const std::string& sentence,
                const std::string& question, const std::string& expected,
                const char* mode) {
    bodies[page] += " " + sentence;
    std::string id = "F" + std::to_string(++fact_n);
    state.tables["facts"][id] = Value(Value::Map{
        {"question", Value(question)},
        {"expected", Value(expected)},
        {"mode", Value(std::string(mode))},
        {"domain", Value("web")},
        {"page_id", Value(ids[page])},
    });
  }

  void run(Scale scale) {
    std::size_t page_count = scale == Scale::Small ? 8 : 20;
    int fact_count = scale == Scale::Small ? 4 : 8;
    ids.push_back("home");
    for (std::size_t k = 1; k < page_count; ++k) {
      ids.push_back("p" + std::to_string(k));
    }
    bodies.resize(page_count);
    links.resize(page_count);
    for (std::size_t k = 0; k < page_count; ++k) {
      bodies[k] = std::string(rng.pick(kFiller));
      bodies[k] += " ";
      bodies[k] += rng.pick(kFiller);
    }
    // Spanning tree rooted at the landing page keeps every page reachable.
    for (std::size_t k = 1; k < page_count; ++k) {
      links[rng.below(k)].push_back(Value(ids[k]));
    }
    std::uint64_t extra = page_count / 2;
    for (std::uint64_t e = 0; e < extra; ++e) {
      std::size_t from = rng.below(page_count);
      std::size_t to = rng.below(page_count);
      if (from == to) continue;
      bool duplicate = false;
      for (const Value& existing : links[from]) {
        if (existing.as_str() == ids[to]) duplicate = true;
      }
      if (!duplicate) links[from].push_back(Value(ids[to]));
    }
    std::vector<std::string> used_codes;
    for (int f = 0; f < fact_count; ++f) {
      std::size_t page = rng.below(page_count);
      if (f % 2 == 0) {
        std::string code;
        do {
          code = std::string(rng.pick(kCodeWords)) + "-" +
                 std::to_string(100 + rng.below(900));
        } while (std::count(used_codes.begin(), used_codes.end(), code) > 0);
        used_codes.push_back(code);
        std::string place = rng.pick(kPlaces);
        add_fact(page,
                 "The access code for the " + place + " vault is " + code + ".",
                 "What is the access code for the " + place + " vault?", code,
                 "exact_string");
      } else {
        std::string place = rng.pick(kPlaces);
        std::int64_t crates = 10 + static_cast<std::int64_t>(rng.below(990));
        add_fact(page,
                 "The depot at " + place + " currently stores " +
                     std::to_string(crates) + " crates.",
                 "How many crates does the depot at " + place + " store?",
                 std::to_string(crates), "numeric");
      }
    }
    for (std::size_t k = 0; k < page_count; ++k) {
      state.tables["pages"][ids[k]] = Value(Value::Map{
          {"page_id", Value(ids[k])},
          {"title", Value(k == 0 ? std::string("Front Desk")
                                 : std::string(kTopics[(k - 1) % kTopics.size()]))},
          {"body", Value(bodies[k])},
          {"links", Value(links[k])},
      });
    }
  }
};

ToolRegistry build_registry() {
  ToolRegistry reg;
  reg.add({"get_landing_page", {}, "Open the site's landing page.", false, false},
          [](EnvState& state, const Value::Map&) {
            return Value(fetch_page(state, "home"));
          });
  reg.add({"open_page",
           {{"page_id", "string", true}},
           "Open a page by id: title, body, and outgoing links.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(fetch_page(state, args.at("page_id").as_str()));
          });
  reg.add({"follow_link",
           {{"page_id", "string", true}, {"link_index", "int", true}},
           "Open the page at the given index of a page's links list.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            const auto& page = fetch_page(state, args.at("page_id").as_str());
            const Value::List& page_links = page.at("links").as_list();
            std::int64_t index = args.at("link_index").as_int();
            if (index < 0 || index >= static_cast<std::int64_t>(page_links.size())) {
              throw ToolError(ToolError::Code::BadArgument,
                              "link_index " + std::to_string(index) +
                                  " out of range for " +
                                  std::to_string(page_links.size()) + " links");
            }
            return Value(
                fetch_page(state, page_links[static_cast<std::size_t>(index)].as_str()));
          });
  reg.add({"find_text",
           {{"page_id", "string", true}, {"query", "string", true}},
           "True when the query occurs in the page title or body "
           "(case-insensitive).",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            const auto& page = fetch_page(state, args.at("page_id").as_str());
            const std::string& query = args.at("query").as_str();
            return Value(contains_fold(page.at("title").as_str(), query) ||
                         contains_fold(page.at("body").as_str(), query));
          });
  reg.add({"list_page_ids", {}, "List every page id on the site.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("pages")) {
              out.push_back(Value(id));
            }
            return Value(std::move(out));
          });
  reg.add({"list_facts", {}, "List the ids of the planted question cards.", false, true},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            auto it = state.tables.find("facts");
            if (it != state.tables.end()) {
              for (const auto& [id, record] : it->second) out.push_back(Value(id));
            }
            return Value(std::move(out));
          });
  reg.add({"get_fact",
           {{"fact_id", "string", true}},
           "Read a planted question card: question, expected answer, match mode.",
           false,
           true},
          [](EnvState& state, const Value::Map& args) {
            auto tit = state.tables.find("facts");
            if (tit == state.tables.end() ||
                !tit->second.count(args.at("fact_id").as_str())) {
              throw ToolError(ToolError::Code::NotFound,
                              "fact '" + args.at("fact_id").as_str() + "' not found");
            }
            return tit->second.at(args.at("fact_id").as_str());
          });
  reg.add({"match_answer",
           {{"answer", "string", true},
            {"expected", "string", true},
            {"mode", "string", true}},
           "Compare an answer against an expected value. mode is 'numeric' "
           "(absolute tolerance 1e-6) or 'exact_string' (trimmed, case-insensitive).",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            const std::string& mode = args.at("mode").as_str();
            AnswerTask task;
            task.expected_answer = args.at("expected").as_str();
            if (mode == "numeric") {
              task.match_mode = AnswerTask::Mode::Numeric;
            } else if (mode == "exact_string") {
              task.match_mode = AnswerTask::Mode::ExactString;
            } else {
              throw ToolError(ToolError::Code::BadArgument,
                              "mode must be 'numeric' or 'exact_string'");
            }
            return Value(match_answer(args.at("answer").as_str(), task));
          });
  return reg;
}

class WebEnv : public Environment {
 public:
  explicit WebEnv(Scale scale) : scale_(scale), registry_(build_registry()) {}

  std::string name() const override { return "web"; }

  EnvState reset(std::uint64_t seed) const override {
    Generator gen(seed);
    gen.run(scale_);
    return std::move(gen.state);
  }

  const env::ToolRegistry& tools() const override { return registry_; }

  std::string description() const override {
    return "Small read-only website. Navigation starts at the landing page "
           "and follows links; find_text checks pages for a phrase. Tasks end "
           "with a final answer checked by match_answer.";
  }

  bool answer_mode() const override { return true; }

 private:
  Scale scale_;
  env::ToolRegistry registry_;
};

}  // namespace

std::unique_ptr<Environment> make_web_env(Scale scale) {
  return std::make_unique<WebEnv>(scale);
}

}  // namespace catforge::envs
