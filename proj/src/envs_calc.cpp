#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <set>
#include <string>

#include "catforge/util/rng.hpp"
#include "envs_internal.hpp"

namespace catforge::envs {

namespace {

using env::ToolError;
using env::ToolRegistry;

constexpr std::array<const char*, 8> kCities = {
    "auckland", "barcelona", "cairo", "denver",
    "edinburgh", "florence", "geneva", "helsinki"};

constexpr std::array<const char*, 8> kSymbols = {
    "ACME", "BLTZ", "CORE", "DYNE", "EXON", "FLUX", "GRID", "HYDR"};

constexpr std::array<const char*, 10> kWords = {
    "orchid", "falcon", "nebula", "quartz", "harbor",
    "lantern", "meadow", "python", "copper", "violet"};

bool valid_dna(const std::string& seq) {
  if (seq.empty()) return false;
  for (char c : seq) {
    char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u != 'A' && u != 'C' && u != 'G' && u != 'T') return false;
  }
  return true;
}

std::string require_dna(const Value& v) {
  const std::string& seq = v.as_str();
  if (!valid_dna(seq)) {
    throw ToolError(ToolError::Code::BadArgument,
                    "'" + seq + "' is not a valid DNA sequence");
  }
  std::string upper;
  for (char c : seq) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return upper;
}

char complement(char c) {
  switch (c) {
    case 'A': return 'T';
    case 'T': return 'A';
    case 'C': return 'G';
    case 'G': return 'C';
  }
  return c;
}

std::string caesar_shift(const std::string& text, std::int64_t shift) {
  std::int64_t k = ((shift % 26) + 26) % 26;
  std::string out;
  for (char c : text) {
    if (c >= 'a' && c <= 'z') {
      out += static_cast<char>('a' + (c - 'a' + k) % 26);
    } else if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>('A' + (c - 'A' + k) % 26);
    } else {
      out += c;
    }
  }
  return out;
}

std::string hex_of(const std::string& text) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (unsigned char c : text) {
    out += digits[c >> 4];
    out += digits[c & 0xF];
  }
  return out;
}

int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return 10 + (c - 'a');
  if (c >= 'A' && c <= 'F') return 10 + (c - 'A');
  return -1;
}

std::string unhex(const std::string& text) {
  if (text.size() % 2 != 0) {
    throw ToolError(ToolError::Code::BadArgument, "hex text has odd length");
  }
  std::string out;
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = hex_digit(text[i]);
    int lo = hex_digit(text[i + 1]);
    if (hi < 0 || lo < 0) {
      throw ToolError(ToolError::Code::BadArgument,
                      "'" + text + "' is not valid hex");
    }
    out += static_cast<char>((hi << 4) | lo);
  }
  return out;
}

std::string atbash_map(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c >= 'a' && c <= 'z') {
      out += static_cast<char>('z' - (c - 'a'));
    } else if (c >= 'A' && c <= 'Z') {
      out += static_cast<char>('Z' - (c - 'A'));
    } else {
      out += c;
    }
  }
  return out;
}

const Value::Map& fetch(const EnvState& state, const char* table,
                        const std::string& id, const char* what) {
  auto tit = state.tables.find(table);
  if (tit == state.tables.end() || !tit->second.count(id)) {
    throw ToolError(ToolError::Code::NotFound,
                    std::string(what) + " '" + id + "' not found");
  }
  return tit->second.at(id).as_map();
}

double stock_price(const Value::Map& stock) {
  return stock.at("history").as_list().back().number();
}

struct Generator {
  util::Rng rng;
  EnvState state;
  int fact_n = 0;

  explicit Generator(std::uint64_t seed) : rng(util::derive_seed(seed, 0x63616c63ULL)) {
    state.rng_seed = seed;
  }

  // `detail` carries machine-readable parameters so challengers can write
  // tool-using solutions without parsing the question prose.
  void add_fact(const std::string& question, const std::string& expected,
                const char* mode, Value::Map detail) {
    std::string id = "F" + std::to_string(++fact_n);
    detail["question"] = Value(question);
    detail["expected"] = Value(expected);
    detail["mode"] = Value(std::string(mode));
    state.tables["facts"][id] = Value(std::move(detail));
  }

  void gen_travel() {
    int flight_n = 0;
    for (const char* origin : kCities) {
      for (const char* destination : kCities) {
        if (origin == destination || !rng.chance(0.5)) continue;
        std::string id = "CF" + std::to_string(100 + ++flight_n);
        state.tables["calc_flights"][id] = Value(Value::Map{
            {"flight_id", Value(id)},
            {"origin", Value(std::string(origin))},
            {"destination", Value(std::string(destination))},
            {"price", Value(dollars(9000 + static_cast<std::int64_t>(rng.below(41000))))},
        });
      }
    }
    int hotel_n = 0;
    for (const char* city : kCities) {
      std::uint64_t count = 1 + rng.below(2);
      for (std::uint64_t k = 0; k < count; ++k) {
        std::string id = "H" + std::to_string(200 + ++hotel_n);
        state.tables["calc_hotels"][id] = Value(Value::Map{
            {"hotel_id", Value(id)},
            {"city", Value(std::string(city))},
            {"price_per_night",
             Value(dollars(4000 + static_cast<std::int64_t>(rng.below(21000))))},
        });
      }
    }
  }

  void gen_stocks() {
    for (const char* symbol : kSymbols) {
      Value::List history;
      std::int64_t cents = 1000 + static_cast<std::int64_t>(rng.below(49000));
      for (int day = 0; day < 5; ++day) {
        cents += static_cast<std::int64_t>(rng.below(2001)) - 1000;
        if (cents < 100) cents = 100;
        history.push_back(Value(dollars(cents)));
      }
      state.tables["calc_stocks"][symbol] = Value(Value::Map{
          {"symbol", Value(std::string(symbol))},
          {"history", Value(std::move(history))},
      });
    }
  }

  std::string random_dna(std::size_t length) {
    static const char* bases = "ACGT";
    std::string seq;
    for (std::size_t k = 0; k < length; ++k) seq += bases[rng.below(4)];
    return seq;
  }

  void gen_facts(int per_domain) {
    std::vector<const Value::Map*> flights;
    for (const auto& [id, record] : state.tables.at("calc_flights")) {
      flights.push_back(&record.as_map());
    }
    for (int k = 0; k < per_domain; ++k) {
      const Value::Map& flight = *rng.pick(flights);
      const std::string& city = flight.at("destination").as_str();
      std::vector<const Value::Map*> hotels;
      for (const auto& [id, record] : state.tables.at("calc_hotels")) {
        if (record.as_map().at("city").as_str() == city) hotels.push_back(&record.as_map());
      }
      const Value::Map& hotel = *rng.pick(hotels);
      std::int64_t nights = 2 + static_cast<std::int64_t>(rng.below(4));
      double budget = flight.at("price").number() +
                      hotel.at("price_per_night").number() * static_cast<double>(nights);
      add_fact("A traveler takes flight " + flight.at("flight_id").as_str() +
                   " and stays " + std::to_string(nights) + " nights at hotel " +
                   hotel.at("hotel_id").as_str() +
                   ". What is the total budget in dollars?",
               ctl::float_repr(budget), "numeric",
               Value::Map{{"domain", Value("travel")},
                          {"flight_id", flight.at("flight_id")},
                          {"origin", flight.at("origin")},
                          {"destination", flight.at("destination")},
                          {"hotel_id", hotel.at("hotel_id")},
                          {"nights", Value(nights)}});
    }
    for (int k = 0; k < per_domain; ++k) {
      std::string seq = random_dna(12 + rng.below(9));
      if (k % 2 == 0) {
        std::int64_t gc = 0;
        for (char c : seq) {
          if (c == 'G' || c == 'C') ++gc;
        }
        double content = static_cast<double>(gc) / static_cast<double>(seq.size());
        add_fact("What fraction of the bases in the DNA sequence " + seq +
                     " are G or C?",
                 ctl::float_repr(content), "numeric",
                 Value::Map{{"domain", Value("dna")},
                            {"op", Value("gc_content")},
                            {"sequence", Value(seq)}});
      } else {
        std::string rc;
        for (auto it = seq.rbegin(); it != seq.rend(); ++it) rc += complement(*it);
        add_fact("What is the reverse complement of the DNA sequence " + seq + "?",
                 rc, "exact_string",
                 Value::Map{{"domain", Value("dna")},
                            {"op", Value("reverse_complement")},
                            {"sequence", Value(seq)}});
      }
    }
    for (int k = 0; k < per_domain; ++k) {
      std::string word = rng.pick(kWords);
      std::int64_t shift = 1 + static_cast<std::int64_t>(rng.below(25));
      std::string ciphered = caesar_shift(word, shift);
      std::string wire = hex_of(std::string(ciphered.rbegin(), ciphered.rend()));
      add_fact("The message '" + wire +
                   "' was produced by applying a Caesar cipher with shift " +
                   std::to_string(shift) +
                   ", reversing the result, and hex-encoding it. What was the "
                   "original message?",
               word, "exact_string",
               Value::Map{{"domain", Value("decoder")},
                          {"wire", Value(wire)},
                          {"shift", Value(shift)}});
    }
    for (int k = 0; k < per_domain; ++k) {
      const char* symbol = rng.pick(kSymbols);
      std::int64_t shares = 5 + static_cast<std::int64_t>(rng.below(46));
      double value = stock_price(state.tables.at("calc_stocks").at(symbol).as_map()) *
                     static_cast<double>(shares);
      add_fact("What is the current value of " + std::to_string(shares) +
                   " shares of " + symbol + "?",
               ctl::float_repr(value), "numeric",
               Value::Map{{"domain", Value("trade")},
                          {"symbol", Value(std::string(symbol))},
                          {"shares", Value(shares)}});
    }
  }

  void run(Scale scale) {
    gen_travel();
    gen_stocks();
    gen_facts(scale == Scale::Small ? 2 : 4);
  }
};

ToolRegistry build_registry() {
  ToolRegistry reg;
  reg.add({"list_cities", {}, "List every city served by flights or hotels.", false, false},
          [](EnvState& state, const Value::Map&) {
            std::set<std::string> cities;
            for (const auto& [id, record] : state.tables.at("calc_flights")) {
              cities.insert(record.as_map().at("origin").as_str());
              cities.insert(record.as_map().at("destination").as_str());
            }
            for (const auto& [id, record] : state.tables.at("calc_hotels")) {
              cities.insert(record.as_map().at("city").as_str());
            }
            Value::List out;
            for (const auto& city : cities) out.push_back(Value(city));
            return Value(std::move(out));
          });
  reg.add({"find_flights",
           {{"origin", "string", true}, {"destination", "string", true}},
           "List flights between two cities.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("calc_flights")) {
              const auto& flight = record.as_map();
              if (flight.at("origin").as_str() == args.at("origin").as_str() &&
                  flight.at("destination").as_str() == args.at("destination").as_str()) {
                out.push_back(record);
              }
            }
            return Value(std::move(out));
          });
  reg.add({"find_hotels",
           {{"city", "string", true}},
           "List hotels in a city with nightly prices.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            Value::List out;
            for (const auto& [id, record] : state.tables.at("calc_hotels")) {
              if (record.as_map().at("city").as_str() == args.at("city").as_str()) {
                out.push_back(record);
              }
            }
            return Value(std::move(out));
          });
  reg.add({"book_hotel",
           {{"hotel_id", "string", true}, {"num_nights", "int", true}},
           "Quote the total price for a hotel stay. Does not change any state.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            const auto& hotel = fetch(state, "calc_hotels",
                                      args.at("hotel_id").as_str(), "hotel");
            std::int64_t nights = args.at("num_nights").as_int();
            if (nights < 1) {
              throw ToolError(ToolError::Code::BadArgument,
                              "num_nights must be positive");
            }
            return Value(Value::Map{
                {"hotel_id", hotel.at("hotel_id")},
                {"num_nights", Value(nights)},
                {"total_price", Value(hotel.at("price_per_night").number() *
                                      static_cast<double>(nights))},
            });
          });
  reg.add({"budget_calculator",
           {{"flight_price", "number", true},
            {"hotel_price_per_night", "number", true},
            {"num_nights", "int", true}},
           "Total trip cost: flight_price plus hotel_price_per_night times num_nights.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(args.at("flight_price").number() +
                         args.at("hotel_price_per_night").number() *
                             static_cast<double>(args.at("num_nights").as_int()));
          });
  reg.add({"currency_convert",
           {{"amount", "number", true}, {"rate", "number", true}},
           "Convert an amount using an exchange rate.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(args.at("amount").number() * args.at("rate").number());
          });
  reg.add({"is_valid_dna_sequence",
           {{"sequence", "string", true}},
           "True when the string is nonempty and contains only A, C, G, T.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(valid_dna(args.at("sequence").as_str()));
          });
  reg.add({"gc_content",
           {{"sequence", "string", true}},
           "Fraction of bases that are G or C.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            std::string seq = require_dna(args.at("sequence"));
            std::int64_t gc = 0;
            for (char c : seq) {
              if (c == 'G' || c == 'C') ++gc;
            }
            return Value(static_cast<double>(gc) / static_cast<double>(seq.size()));
          });
  reg.add({"reverse_complement",
           {{"sequence", "string", true}},
           "Reverse the sequence and complement each base.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            std::string seq = require_dna(args.at("sequence"));
            std::string out;
            for (auto it = seq.rbegin(); it != seq.rend(); ++it) out += complement(*it);
            return Value(out);
          });
  reg.add({"transcribe_to_rna",
           {{"sequence", "string", true}},
           "Replace T with U.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            std::string seq = require_dna(args.at("sequence"));
            for (char& c : seq) {
              if (c == 'T') c = 'U';
            }
            return Value(seq);
          });
  reg.add({"count_nucleotide",
           {{"sequence", "string", true}, {"nucleotide", "string", true}},
           "Count occurrences of one base in the sequence.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            std::string seq = require_dna(args.at("sequence"));
            std::string base = require_dna(args.at("nucleotide"));
            if (base.size() != 1) {
              throw ToolError(ToolError::Code::BadArgument,
                              "nucleotide must be a single base");
            }
            std::int64_t n = 0;
            for (char c : seq) {
              if (c == base[0]) ++n;
            }
            return Value(n);
          });
  reg.add({"find_motif",
           {{"sequence", "string", true}, {"motif", "string", true}},
           "List the 0-based start indices where the motif occurs.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            std::string seq = require_dna(args.at("sequence"));
            std::string motif = require_dna(args.at("motif"));
            Value::List out;
            for (std::size_t i = 0; i + motif.size() <= seq.size(); ++i) {
              if (seq.compare(i, motif.size(), motif) == 0) {
                out.push_back(Value(static_cast<std::int64_t>(i)));
              }
            }
            return Value(std::move(out));
          });
  reg.add({"caesar_encode",
           {{"text", "string", true}, {"shift", "int", true}},
           "Shift letters forward in the alphabet; other characters unchanged.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(caesar_shift(args.at("text").as_str(), args.at("shift").as_int()));
          });
  reg.add({"caesar_decode",
           {{"text", "string", true}, {"shift", "int", true}},
           "Shift letters backward in the alphabet; inverse of caesar_encode.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(caesar_shift(args.at("text").as_str(), -args.at("shift").as_int()));
          });
  reg.add({"reverse_string",
           {{"text", "string", true}},
           "Reverse the characters of the text.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            const std::string& text = args.at("text").as_str();
            return Value(std::string(text.rbegin(), text.rend()));
          });
  reg.add({"hex_encode",
           {{"text", "string", true}},
           "Lowercase hex encoding of the text bytes.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(hex_of(args.at("text").as_str()));
          });
  reg.add({"hex_decode",
           {{"text", "string", true}},
           "Decode a hex string back to text.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(unhex(args.at("text").as_str()));
          });
  reg.add({"atbash",
           {{"text", "string", true}},
           "Mirror each letter in the alphabet (a maps to z); self-inverse.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(atbash_map(args.at("text").as_str()));
          });
  reg.add({"list_stock_symbols", {}, "List every known stock symbol.", false, false},
          [](EnvState& state, const Value::Map&) {
            Value::List out;
            for (const auto& [symbol, record] : state.tables.at("calc_stocks")) {
              out.push_back(Value(symbol));
            }
            return Value(std::move(out));
          });
  reg.add({"get_stock_price",
           {{"symbol", "string", true}},
           "Current price: the last entry in the symbol's history.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            return Value(stock_price(
                fetch(state, "calc_stocks", args.at("symbol").as_str(), "symbol")));
          });
  reg.add({"average_price",
           {{"symbol", "string", true}},
           "Mean of the symbol's price history.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            const auto& history =
                fetch(state, "calc_stocks", args.at("symbol").as_str(), "symbol")
                    .at("history")
                    .as_list();
            double sum = 0.0;
            for (const Value& p : history) sum += p.number();
            return Value(sum / static_cast<double>(history.size()));
          });
  reg.add({"portfolio_value",
           {{"holdings", "map", true}},
           "Total current value of a map from symbol to share count.",
           false,
           false},
          [](EnvState& state, const Value::Map& args) {
            double total = 0.0;
            for (const auto& [symbol, shares] : args.at("holdings").as_map()) {
              if (!shares.is_int()) {
                throw ToolError(ToolError::Code::BadArgument,
                                "share counts must be integers");
              }
              total += stock_price(fetch(state, "calc_stocks", symbol, "symbol")) *
                       static_cast<double>(shares.as_int());
            }
            return Value(total);
          });
  reg.add({"trade_profit",
           {{"buy_price", "number", true},
            {"sell_price", "number", true},
            {"shares", "int", true}},
           "Profit from buying and selling a share count at the given prices.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value((args.at("sell_price").number() - args.at("buy_price").number()) *
                         static_cast<double>(args.at("shares").as_int()));
          });
  reg.add({"commission_fee",
           {{"amount", "number", true}, {"rate", "number", true}},
           "Fee for a trade: amount times rate.",
           false,
           false},
          [](EnvState&, const Value::Map& args) {
            return Value(args.at("amount").number() * args.at("rate").number());
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
            return Value(fetch(state, "facts", args.at("fact_id").as_str(), "fact"));
          });
  return reg;
}

class CalculationEnv : public Environment {
 public:
  explicit CalculationEnv(Scale scale) : scale_(scale), registry_(build_registry()) {}

  std::string name() const override { return "calculation"; }

  EnvState reset(std::uint64_t seed) const override {
    Generator gen(seed);
    gen.run(scale_);
    return std::move(gen.state);
  }

  const env::ToolRegistry& tools() const override { return registry_; }

  std::string description() const override {
    return "Calculation desk with four read-only tool families: travel "
           "planning over flight and hotel catalogs, DNA sequence analysis, "
           "message decoding, and trade arithmetic over stock prices. Tasks "
           "end with a final answer checked by match_answer.";
  }

  bool answer_mode() const override { return true; }

 private:
  Scale scale_;
  env::ToolRegistry registry_;
};

}  // namespace

std::unique_ptr<Environment> make_calculation_env(Scale scale) {
  return std::make_unique<CalculationEnv>(scale);
}

}  // namespace catforge::envs
