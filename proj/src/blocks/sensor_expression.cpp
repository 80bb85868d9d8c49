// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/blocks/sensor_expression.hpp"

#include <cctype>
#include <regex>

#include "odaframe/common/error.hpp"

namespace oda {

std::string SensorExpression::to_string() const {
  std::string out = "<" + level.to_string();
  if (filter) out += ", filter " + *filter;
  out += ">" + sensor_name;
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

class ExpressionParser {
 public:
  explicit ExpressionParser(std::string_view text) : text_(text) {}

  SensorExpression parse() {
    SensorExpression expr;
    skip_space();
    expect('<', "expected '<'");

    skip_space();
    const std::size_t keyword_at = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    const std::string_view keyword = text_.substr(keyword_at, pos_ - keyword_at);
    if (keyword == "topdown") {
      expr.level.anchor = LevelSpec::Anchor::kTopDown;
    } else if (keyword == "bottomup") {
      expr.level.anchor = LevelSpec::Anchor::kBottomUp;
    } else {
      fail(keyword_at, "expected level keyword 'topdown' or 'bottomup'");
    }

    if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
      const std::size_t sign_at = pos_;
      const bool negative = text_[pos_] == '-';
      ++pos_;
      const std::size_t digits_at = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      if (pos_ == digits_at || pos_ - digits_at > 6) {
        fail(sign_at, "expected level offset digits");
      }
      const int value = std::stoi(std::string(text_.substr(digits_at, pos_ - digits_at)));
      expr.level.offset = negative ? -value : value;
    }

    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ',') {
      ++pos_;
      skip_space();
      const std::size_t filter_kw_at = pos_;
      if (text_.substr(pos_, 6) != "filter") fail(filter_kw_at, "expected 'filter'");
      pos_ += 6;
      if (pos_ >= text_.size() || !is_space(text_[pos_])) {
        fail(pos_, "expected whitespace after 'filter'");
      }
      skip_space();
      const std::size_t regex_at = pos_;
      const std::size_t close = text_.rfind('>');
      if (close == std::string_view::npos || close < regex_at) {
        fail(text_.size(), "expected '>'");
      }
      std::string_view regex = text_.substr(regex_at, close - regex_at);
      while (!regex.empty() && is_space(regex.back())) regex.remove_suffix(1);
      if (regex.empty()) fail(regex_at, "empty filter");
      try {
        std::regex check{std::string(regex)};
      } catch (const std::regex_error& e) {
        fail(regex_at, std::string("invalid filter regex: ") + e.what());
      }
      expr.filter = std::string(regex);
      pos_ = close;
    }

    expect('>', "expected '>' or ','");

    const std::size_t name_at = pos_;
    std::string_view name = text_.substr(pos_);
    while (!name.empty() && is_space(name.back())) name.remove_suffix(1);
    if (name.empty()) fail(name_at, "expected sensor name");
    for (std::size_t i = 0; i < name.size(); ++i) {
      if (name[i] == '/' || is_space(name[i])) {
        fail(name_at + i, "sensor name must be a single topic segment");
      }
    }
    expr.sensor_name = std::string(name);
    return expr;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  void expect(char c, const char* message) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(pos_, message);
    ++pos_;
  }

  [[noreturn]] void fail(std::size_t at, const std::string& message) const {
    throw ParseError(0, at + 1, message);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace

SensorExpression parse_expression(std::string_view text) {
  return ExpressionParser(text).parse();
}

std::string BlockTemplate::to_string() const {
  std::string out = "input:\n";
  for (const auto& e : inputs) out += "    " + e.to_string() + "\n";
  out += "output:\n";
  for (const auto& e : outputs) out += "    " + e.to_string() + "\n";
  if (!operator_outputs.empty()) {
    out += "operator_output:\n";
    for (const auto& name : operator_outputs) out += "    " + name + "\n";
  }
  return out;
}

BlockTemplate parse_template(std::string_view text, std::size_t first_line) {
  enum class Section { kNone, kInput, kOutput, kOperatorOutput };
  BlockTemplate tmpl;
  Section section = Section::kNone;
  std::size_t line_no = first_line;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view raw = text.substr(pos, end - pos);
    const std::string_view line = trim(raw);
    const std::size_t indent = static_cast<std::size_t>(line.data() - raw.data());

    if (!line.empty() && line.front() != '#') {
      if (line == "input:") {
        section = Section::kInput;
      } else if (line == "output:") {
        section = Section::kOutput;
      } else if (line == "operator_output:" || line == "operator-output:") {
        section = Section::kOperatorOutput;
      } else if (section == Section::kNone) {
        throw ParseError(line_no, indent + 1, "expected 'input:' or 'output:'");
      } else if (section == Section::kOperatorOutput) {
        if (line.find('/') != std::string_view::npos) {
          throw ParseError(line_no, indent + 1, "operator output must be a sensor name");
        }
        tmpl.operator_outputs.emplace_back(line);
      } else {
        try {
          auto expr = parse_expression(line);
          (section == Section::kInput ? tmpl.inputs : tmpl.outputs).push_back(std::move(expr));
        } catch (const ParseError& e) {
          throw ParseError(line_no, indent + e.column(), e.reason());
        }
      }
    }
    pos = end + 1;
    ++line_no;
  }
  if (tmpl.outputs.empty() && tmpl.operator_outputs.empty()) {
    throw ParseError(line_no > first_line ? line_no - 1 : first_line, 1,
                     "template has no outputs");
  }
  return tmpl;
}

}  // namespace oda
