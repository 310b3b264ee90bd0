#ifndef PENALAB_REPORT_JSON_HPP
#define PENALAB_REPORT_JSON_HPP

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace penalab {

// Minimal JSON value for report emission: insertion-ordered keys and
// 17-significant-digit numerics so identical runs serialize byte-identically.
class JsonValue {
public:
  enum class Type { object, array, number, integer, boolean, string, null };

  JsonValue() : type_(Type::null) {}
  static JsonValue object();
  static JsonValue array();
  static JsonValue number(double x);
  static JsonValue integer(long long x);
  static JsonValue boolean(bool b);
  static JsonValue string(std::string s);

  Type type() const { return type_; }
  JsonValue& set(const std::string& key, JsonValue v); // object
  JsonValue& push(JsonValue v);                        // array
  std::string dump(int indent = 2) const;

  // Convenience setters.
  JsonValue& set(const std::string& key, double x) { return set(key, number(x)); }
  JsonValue& set(const std::string& key, int x) { return set(key, integer(x)); }
  JsonValue& set(const std::string& key, long long x) { return set(key, integer(x)); }
  JsonValue& set(const std::string& key, bool b) { return set(key, boolean(b)); }
  JsonValue& set(const std::string& key, const char* s) { return set(key, string(s)); }
  JsonValue& set(const std::string& key, const std::string& s) { return set(key, string(s)); }

private:
  void dump_to(std::string& out, int indent, int depth) const;

  Type type_;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, JsonValue>> members_;
  std::vector<JsonValue> items_;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace penalab

#endif
