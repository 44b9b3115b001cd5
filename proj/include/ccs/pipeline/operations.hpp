#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ccs/json_io.hpp"
#include "ccs/store/object_store.hpp"

namespace ccs::pipeline {

/// What a handler sees: input object keys, parameters and the store. Handlers
/// are pure functions of these and return the key of the object they wrote.
struct OpContext {
    const std::vector<std::string>& inputs;
    const Json& params;
    store::ObjectStore& store;

    /// Bytes of input `i`; throws missing-input when absent.
    std::string input(std::size_t i) const;
    std::size_t input_count() const { return inputs.size(); }
};

using Handler = std::function<std::string(const OpContext&)>;

struct Operation {
    std::string name;
    std::string queue;
    Handler handler;
};

class Registry {
public:
    void add(Operation op);
    const Operation* find(const std::string& name) const;
    std::vector<std::string> names() const;

    /// parse, predict, assemble, train, detect and detect-eval.
    static Registry defaults();

private:
    std::map<std::string, Operation> ops_;
};

}  // namespace ccs::pipeline
