#include "pathcert/scene.hpp"

#include <set>
#include <stdexcept>

namespace pathcert {

int Scene::find_body(const std::string& name) const {
  for (std::size_t i = 0; i < bodies.size(); ++i)
    if (bodies[i].name == name) return static_cast<int>(i);
  return -1;
}

void Scene::validate() const {
  chain.validate();
  std::set<std::string> names;
  for (const auto& b : bodies) {
    b.validate();
    if (b.link < 0 || b.link >= chain.size())
      throw std::invalid_argument("Scene: body '" + b.name +
                                  "' attached to an unknown link");
    if (!names.insert(b.name).second)
      throw std::invalid_argument("Scene: duplicate body name '" + b.name +
                                  "'");
  }
  for (const auto& p : pairs) {
    if (p.a < 0 || p.b < 0 || p.a >= static_cast<int>(bodies.size()) ||
        p.b >= static_cast<int>(bodies.size()))
      throw std::invalid_argument("Scene: collision pair body out of range");
    if (p.a == p.b)
      throw std::invalid_argument("Scene: collision pair repeats a body");
  }
}

}  // namespace pathcert
