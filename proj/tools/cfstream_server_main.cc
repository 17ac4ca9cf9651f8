// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cfstream_server: HTTP front end of the live explanation service.

#include <csignal>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cfstream/error.h"
#include "cfstream/json_io.h"
#include "cfstream/service.h"
#include "cfstream/synth.h"

namespace {

cfstream::HttpService* g_service = nullptr;

void HandleSignal(int) {
  if (g_service != nullptr) g_service->Stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Live counterfactual explanation service"};
  std::string schema_path;
  std::string schema_name = "default";
  std::string host = "127.0.0.1";
  int port = 8080;
  int synth_labels = 4;
  auto* schema_opt = app.add_option("--schema", schema_path,
                                    "Schema JSON of the pushed items")
                         ->check(CLI::ExistingFile);
  app.add_option("--schema-name", schema_name, "Value clients send as schemaRef")
      ->capture_default_str();
  app.add_option("--synth-labels", synth_labels,
                 "Without --schema, serve the synthetic generator's schema "
                 "with this many labels")
      ->excludes(schema_opt)
      ->capture_default_str();
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port, "0 picks a free port")->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    std::shared_ptr<const cfstream::Schema> schema;
    std::optional<cfstream::CategoryDictionary> dictionary;
    if (!schema_path.empty()) {
      schema = std::make_shared<const cfstream::Schema>(
          cfstream::LoadSchemaFile(schema_path));
    } else {
      cfstream::SynthConfig synth;
      synth.labels = synth_labels;
      schema = cfstream::SynthSchema(synth);
      dictionary = cfstream::SynthDictionary(synth);
    }
    cfstream::ServiceCore core(schema_name, schema, std::move(dictionary));
    cfstream::HttpService service(&core);
    const int bound = service.Bind(host, port);
    if (bound < 0) {
      std::cerr << "cannot bind " << host << ":" << port << "\n";
      return 1;
    }
    g_service = &service;
    std::signal(SIGINT, HandleSignal);
    std::signal(SIGTERM, HandleSignal);
    std::cout << "listening on http://" << host << ":" << bound << "/v1/"
              << std::endl;
    service.Serve();
    g_service = nullptr;
  } catch (const cfstream::Error& e) {
    std::cerr << cfstream::ErrorToJson(e).dump() << "\n";
    return e.code() == cfstream::ErrorCode::kIoError ? 4 : 2;
  }
  return 0;
}
