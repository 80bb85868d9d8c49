// Copyright 2026 The odaframe Authors
// SPDX-License-Identifier: Apache-2.0

#include "odaframe/common/config_text.hpp"

#include <charconv>
#include <cstdlib>

#include "odaframe/common/error.hpp"

namespace oda {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view v) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') {
    return std::string(v.substr(1, v.size() - 2));
  }
  return std::string(v);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(pos, end - pos));
    pos = end + 1;
  }
  return lines;
}

}  // namespace

const ConfigNode* ConfigNode::child(std::string_view name) const {
  for (const auto& c : children) {
    if (c.key == name) return &c;
  }
  return nullptr;
}

std::vector<const ConfigNode*> ConfigNode::children_named(std::string_view name) const {
  std::vector<const ConfigNode*> out;
  for (const auto& c : children) {
    if (c.key == name) out.push_back(&c);
  }
  return out;
}

std::optional<std::string> ConfigNode::get(std::string_view name) const {
  const auto* c = child(name);
  if (!c || c->is_section) return std::nullopt;
  return c->value;
}

std::string ConfigNode::get_or(std::string_view name, std::string fallback) const {
  auto v = get(name);
  return v ? *v : std::move(fallback);
}

std::int64_t ConfigNode::get_int(std::string_view name, std::int64_t fallback) const {
  const auto* c = child(name);
  if (!c || c->is_section) return fallback;
  std::int64_t out = 0;
  const auto* first = c->value.data();
  const auto* last = first + c->value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(c->line, 1, "'" + c->key + "' expects an integer, got '" + c->value + "'");
  }
  return out;
}

double ConfigNode::get_double(std::string_view name, double fallback) const {
  const auto* c = child(name);
  if (!c || c->is_section) return fallback;
  char* end = nullptr;
  const double out = std::strtod(c->value.c_str(), &end);
  if (c->value.empty() || end != c->value.c_str() + c->value.size()) {
    throw ParseError(c->line, 1, "'" + c->key + "' expects a number, got '" + c->value + "'");
  }
  return out;
}

bool ConfigNode::get_bool(std::string_view name, bool fallback) const {
  const auto* c = child(name);
  if (!c || c->is_section) return fallback;
  if (c->value == "true" || c->value == "on" || c->value == "yes" || c->value == "1") return true;
  if (c->value == "false" || c->value == "off" || c->value == "no" || c->value == "0") return false;
  throw ParseError(c->line, 1, "'" + c->key + "' expects a boolean, got '" + c->value + "'");
}

void ConfigNode::set(std::string name, std::string value) {
  for (auto& c : children) {
    if (c.key == name && !c.is_section) {
      c.value = std::move(value);
      return;
    }
  }
  ConfigNode node;
  node.key = std::move(name);
  node.value = std::move(value);
  children.push_back(std::move(node));
}

ConfigNode parse_config_text(std::string_view text,
                             const std::set<std::string, std::less<>>& raw_sections) {
  const auto lines = split_lines(text);
  ConfigNode root;
  root.is_section = true;
  std::vector<ConfigNode*> stack{&root};

  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const std::string_view raw_line = lines[i];
    const std::string_view line = trim(raw_line);
    const std::size_t column = static_cast<std::size_t>(line.data() - raw_line.data()) + 1;
    if (line.empty() || line.front() == '#') continue;

    if (line == "}") {
      if (stack.size() == 1) throw ParseError(line_no, column, "unmatched '}'");
      stack.pop_back();
      continue;
    }

    std::size_t key_end = 0;
    while (key_end < line.size() && !is_space(line[key_end]) && line[key_end] != '{') ++key_end;
    ConfigNode node;
    node.key = std::string(line.substr(0, key_end));
    node.line = line_no;
    if (node.key.empty()) throw ParseError(line_no, column, "expected a key");
    std::string_view rest = trim(line.substr(key_end));

    if (!rest.empty() && rest.back() == '{') {
      node.is_section = true;
      node.value = unquote(trim(rest.substr(0, rest.size() - 1)));
      if (raw_sections.count(node.key)) {
        std::string body;
        std::size_t j = i + 1;
        std::size_t depth = 0;
        for (; j < lines.size(); ++j) {
          const std::string_view inner = trim(lines[j]);
          if (inner == "}") {
            if (depth == 0) break;
            --depth;
          } else if (!inner.empty() && inner.front() != '#' && inner.back() == '{') {
            ++depth;
          }
          body += lines[j];
          body += '\n';
        }
        if (j == lines.size()) {
          throw ParseError(line_no, column, "section '" + node.key + "' is not closed");
        }
        node.raw = std::move(body);
        node.raw_line = line_no + 1;
        stack.back()->children.push_back(std::move(node));
        i = j;
        continue;
      }
      stack.back()->children.push_back(std::move(node));
      stack.push_back(&stack.back()->children.back());
      continue;
    }
    node.value = unquote(rest);
    stack.back()->children.push_back(std::move(node));
  }
  if (stack.size() > 1) {
    throw ParseError(stack.back()->line, 1, "section '" + stack.back()->key + "' is not closed");
  }
  return root;
}

namespace {

void serialize_into(const ConfigNode& node, int depth, std::string& out) {
  const std::string indent(static_cast<std::size_t>(depth) * 4, ' ');
  for (const auto& c : node.children) {
    out += indent + c.key;
    const bool quote = !c.value.empty() &&
                       (c.value.back() == '{' || is_space(c.value.front()) ||
                        is_space(c.value.back()) || c.value.front() == '"');
    if (!c.value.empty()) out += " " + (quote ? "\"" + c.value + "\"" : c.value);
    if (!c.is_section) {
      out += "\n";
      continue;
    }
    out += " {\n";
    if (c.raw) {
      out += *c.raw;
    } else {
      serialize_into(c, depth + 1, out);
    }
    out += indent + "}\n";
  }
}

}  // namespace

std::string serialize_config(const ConfigNode& root) {
  std::string out;
  serialize_into(root, 0, out);
  return out;
}

}  // namespace oda
