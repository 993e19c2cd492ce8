/*
 * Copyright (c) 2026, The kbpforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

// Text syntax for formulas (see README for the full grammar):
//
//   forall i. (in_n(i) & !decided(i)) -> (deciding(i) <-> count(i) <= 1)
//   B[0] CN exists_vote(1)
//   gfp X. EN (X & exists_vote(0))
//
// Agent quantifiers are expanded against n at parse time.

#ifndef KBPFORGE_FORMULA_PARSER_HPP_
#define KBPFORGE_FORMULA_PARSER_HPP_

#include <string>
#include <string_view>

#include "kbpforge/formula.hpp"

namespace kbpforge {

class ParseError : public ParamError {
 public:
  ParseError(const std::string& what, std::size_t column)
      : ParamError("column " + std::to_string(column + 1) + ": " + what), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

FormulaPtr parse_formula(std::string_view text, const InstanceParams& params);

}  // namespace kbpforge

#endif  // KBPFORGE_FORMULA_PARSER_HPP_
