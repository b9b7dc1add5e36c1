#pragma once

// Golden interpreter corpus: each program is pure (no tools) and frozen
// against a hand-derived expected value. `expected` is render(result), or
// "error:<Kind>" when evaluation must fail with that RuntimeError kind.

#include <string>
#include <vector>

#include "catforge/ctl/interpreter.hpp"
#include "catforge/ctl/parser.hpp"

namespace golden {

struct GoldenProgram {
  const char* name;
  const char* source;
  const char* expected;
};

inline std::string run_golden(const char* source) {
  using namespace catforge::ctl;
  try {
    EvalOutcome out = evaluate(parse(source));
    return render(out.result);
  } catch (const RuntimeError& e) {
    return std::string("error:") + std::string(to_string(e.kind));
  }
}

inline const std::vector<GoldenProgram>& programs() {
  static const std::vector<GoldenProgram> table = {
      {"add", "return 1 + 2", "3"},
      {"precedence_mul_right", "return 2 + 3 * 4", "14"},
      {"precedence_mul_left", "return 2 * 3 + 4", "10"},
      {"parens", "return (2 + 3) * 4", "20"},
      {"div_float", "return 7 / 2", "3.5"},
      {"div_exact_is_float", "return 6 / 3", "2.0"},
      {"neg_literal", "return -5 + 3", "-2"},
      {"sub_left_assoc", "return 10 - 4 - 3", "3"},
      {"div_left_assoc", "return 100 / 10 / 2", "5.0"},
      {"mixed_mul", "return 2.5 * 4", "10.0"},
      {"int_min_literal", "return -9223372036854775808", "-9223372036854775808"},
      {"float_artifact", "return 0.1 + 0.2", "0.30000000000000004"},
      {"exponent_literal", "return 1e3", "1000.0"},
      {"negative_exponent", "return 2.5e-1", "0.25"},
      {"eq_int_float", "return 1 == 1.0", "true"},
      {"ne", "return 1 != 2", "true"},
      {"lt_false", "return 3 < 2", "false"},
      {"str_order", "return \"a\" < \"ab\"", "true"},
      {"bool_chain", "return true and false or true", "true"},
      {"not_false", "return not false", "true"},
      {"null_eq", "return null == null", "true"},
      {"bool_not_int", "return true == 1", "false"},
      {"cmp_after_add", "return 1 + 2.0 == 3", "true"},
      {"or_short_circuit", "return true or 1 / 0 == 1.0", "true"},
      {"index_middle", "return [1, 2, 3][1]", "2"},
      {"index_negative", "return [1, 2, 3][-1]", "3"},
      {"index_string", "return \"hello\"[0]", "\"h\""},
      {"dot_access", "return {\"a\": 5}.a", "5"},
      {"deep_path", "return {\"a\": {\"b\": [1, 2]}}.a.b[0]", "1"},
      {"len_empty_str", "return len(\"\")", "0"},
      {"len_nested_list", "return len([1, [2, 3]])", "2"},
      {"len_map", "return len({\"x\": 1, \"y\": 2})", "2"},
      {"len_utf8_bytes", "return len(\"\xCE\xB1\xCE\xB2\")", "4"},
      {"contains_substr", "return contains(\"workbench\", \"bench\")", "true"},
      {"contains_element", "return contains([1, \"two\", 3.0], \"two\")", "true"},
      {"contains_empty", "return contains([], 1)", "false"},
      {"contains_key", "return contains({\"k\": 1}, \"k\")", "true"},
      {"str_int", "return str(12)", "\"12\""},
      {"str_float", "return str(1.5)", "\"1.5\""},
      {"str_null", "return str(null)", "\"null\""},
      {"abs_int", "return abs(-7)", "7"},
      {"abs_float_pos", "return abs(3.5)", "3.5"},
      {"round_product_half", "return round(2.675, 2)", "2.68"},
      {"round_half_away", "return round(2.5, 0)", "3.0"},
      {"round_half_away_neg", "return round(-0.5, 0)", "-1.0"},
      {"round_int_negative_digits", "return round(12345, -3)", "12000"},
      {"min_ints", "return min([4, 2, 9])", "2"},
      {"max_ints", "return max([4, 2, 9])", "9"},
      {"max_strings", "return max([\"kiwi\", \"apple\", \"mango\"])", "\"mango\""},
      {"min_tie_first", "return min([2.0, 2])", "2.0"},
      {"min_single", "return min([5])", "5"},
      {"reassign", "x = 1\nx = x + 1\nreturn x", "2"},
      {"result_variable", "result = [1, 2]", "[1, 2]"},
      {"result_updates", "result = 1\nresult = result + 10", "11"},
      {"no_result_is_null", "x = 10", "null"},
      {"empty_program", "", "null"},
      {"if_taken", "if 1 < 2 { return \"lt\" } else { return \"ge\" }", "\"lt\""},
      {"if_skipped", "if false { return 1 }\nreturn 2", "2"},
      {"nested_if",
       "x = 7\nif x < 5 { return \"low\" } else { if x < 10 { return \"mid\" } else { "
       "return \"high\" } }",
       "\"mid\""},
      {"loop_sum", "total = 0\nfor n in [1, 2, 3, 4, 5] { total = total + n }\nreturn total",
       "15"},
      {"loop_concat",
       "acc = \"\"\nfor w in [\"a\", \"b\", \"c\"] { acc = acc + w }\nreturn acc",
       "\"abc\""},
      {"loop_early_return",
       "for n in [1, 2, 3] { if n == 2 { return n * 10 } }\nreturn -1", "20"},
      {"loop_nested",
       "count = 0\nfor i in [1, 2, 3] { for j in [1, 2] { count = count + 1 } }\nreturn count",
       "6"},
      {"loop_empty", "x = 1\nfor n in [] { x = 2 }\nreturn x", "1"},
      {"comments", "# setup\nx = 2 # double\nreturn x * x # done", "4"},
      {"map_renders_sorted", "return {\"b\": 2, \"a\": 1}", "{\"a\": 1, \"b\": 2}"},
      {"mixed_value",
       "return [null, true, 1, 2.5, \"s\", [1], {\"k\": null}]",
       "[null, true, 1, 2.5, \"s\", [1], {\"k\": null}]"},
      {"string_escapes", "return \"quote\\\" tab\\t nl\\n\"", "\"quote\\\" tab\\t nl\\n\""},
      {"value_semantics", "x = [1, 2]\ny = x + [3]\nreturn x", "[1, 2]"},
      {"verifier_shape",
       "order = {\"status\": \"delivered\", \"items\": [\"a\", \"b\"]}\n"
       "return order.status == \"delivered\" and len(order.items) == 2",
       "true"},
      {"last_history_entry",
       "history = [{\"id\": \"p1\"}, {\"id\": \"p2\"}]\nreturn history[-1].id", "\"p2\""},
      {"err_div_zero", "return 1 / 0", "error:DivByZero"},
      {"err_index_range", "return [1][5]", "error:IndexOutOfRange"},
      {"err_key_missing", "return {\"a\": 1}.b", "error:KeyMissing"},
      {"err_undefined_var", "return undefined_var", "error:KeyMissing"},
      {"err_str_times_int", "return \"a\" * 2", "error:TypeMismatch"},
      {"err_truthiness", "if \"yes\" { return 1 }", "error:TypeMismatch"},
      {"err_unknown_tool", "x = mystery_tool(a=1)", "error:UnknownTool"},
      {"err_int_overflow", "return 9223372036854775807 + 1", "error:LimitExceeded"},
      {"err_step_limit",
       "L = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]\n"
       "for a in L { for b in L { for c in L { for d in L { x = 1 } } } }",
       "error:LimitExceeded"},
  };
  return table;
}

}  // namespace golden
