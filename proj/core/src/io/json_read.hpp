#pragma once

#include <cmath>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "clayems/error.hpp"

namespace clayems::io::detail {

using Json = nlohmann::ordered_json;

// A JSON value with its location, for error messages of the form
// "<source>#<pointer>: message".
class Node {
  public:
    Node(const Json& j, std::string source, std::string pointer = "")
        : j_(&j), source_(std::move(source)), pointer_(std::move(pointer)) {}

    [[noreturn]] void fail(const std::string& message) const {
        throw ValidationError(source_ + "#" + (pointer_.empty() ? "/" : pointer_) + ": " + message);
    }

    const Json& json() const noexcept { return *j_; }
    const std::string& pointer() const noexcept { return pointer_; }
    const std::string& source() const noexcept { return source_; }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }

    Node at(const std::string& key) const {
        expect_object();
        if (!j_->contains(key)) {
            fail("missing required field '" + key + "'");
        }
        return child(key);
    }

    std::optional<Node> maybe(const std::string& key) const {
        expect_object();
        if (!j_->contains(key) || (*j_)[key].is_null()) {
            return std::nullopt;
        }
        return child(key);
    }

    Node operator[](std::size_t i) const { return Node((*j_)[i], source_, pointer_ + "/" + std::to_string(i)); }

    std::size_t size() const {
        expect_array();
        return j_->size();
    }

    void expect_object() const {
        if (!j_->is_object()) {
            fail("expected an object");
        }
    }
    void expect_array() const {
        if (!j_->is_array()) {
            fail("expected an array");
        }
    }

    // Rejects unknown keys so that typos do not silently fall back to defaults.
    void allow(std::initializer_list<const char*> keys) const {
        expect_object();
        std::set<std::string> ok(keys.begin(), keys.end());
        for (auto it = j_->begin(); it != j_->end(); ++it) {
            if (!ok.count(it.key())) {
                child(it.key()).fail("unknown field '" + it.key() + "'");
            }
        }
    }

    double number() const {
        if (!j_->is_number()) {
            fail("expected a number");
        }
        const double v = j_->get<double>();
        if (!std::isfinite(v)) {
            fail("expected a finite number");
        }
        return v;
    }

    std::string string() const {
        if (!j_->is_string()) {
            fail("expected a string");
        }
        return j_->get<std::string>();
    }

    bool boolean() const {
        if (!j_->is_boolean()) {
            fail("expected true or false");
        }
        return j_->get<bool>();
    }

    int integer() const {
        if (!j_->is_number_integer()) {
            fail("expected an integer");
        }
        return j_->get<int>();
    }

    double num(const std::string& key) const { return at(key).number(); }
    double num(const std::string& key, double fallback) const {
        const auto n = maybe(key);
        return n ? n->number() : fallback;
    }
    // Reads into `target` when present, leaving the default otherwise.
    void read(const std::string& key, double& target) const { target = num(key, target); }
    void read(const std::string& key, int& target) const {
        if (const auto n = maybe(key)) {
            target = n->integer();
        }
    }
    void read(const std::string& key, bool& target) const {
        if (const auto n = maybe(key)) {
            target = n->boolean();
        }
    }

    double positive(const std::string& key, double fallback) const {
        const double v = num(key, fallback);
        if (!(v > 0.0)) {
            (has(key) ? child(key) : *this).fail("'" + key + "' must be > 0");
        }
        return v;
    }
    double non_negative(const std::string& key, double fallback) const {
        const double v = num(key, fallback);
        if (!(v >= 0.0)) {
            (has(key) ? child(key) : *this).fail("'" + key + "' must be >= 0");
        }
        return v;
    }

    std::vector<double> numbers(std::size_t expected) const {
        expect_array();
        if (j_->size() != expected) {
            fail("expected " + std::to_string(expected) + " numbers");
        }
        std::vector<double> v;
        for (std::size_t i = 0; i < expected; ++i) {
            v.push_back((*this)[i].number());
        }
        return v;
    }

  private:
    Node child(const std::string& key) const { return Node((*j_)[key], source_, pointer_ + "/" + escape(key)); }

    static std::string escape(const std::string& key) {
        std::string out;
        for (char c : key) {
            if (c == '~') {
                out += "~0";
            } else if (c == '/') {
                out += "~1";
            } else {
                out += c;
            }
        }
        return out;
    }

    const Json* j_;
    std::string source_;
    std::string pointer_;
};

inline Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ValidationError(source + ": malformed JSON: " + e.what());
    }
}

inline void check_schema_version(const Node& root, int version) {
    if (const auto v = root.maybe("schema_version")) {
        if (v->integer() != version) {
            v->fail("unsupported schema_version " + std::to_string(v->integer()) + ", expected " +
                    std::to_string(version));
        }
    }
}

}  // namespace clayems::io::detail
