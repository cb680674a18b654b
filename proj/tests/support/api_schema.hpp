#pragma once

// Validates payloads against schemas/api.json (JSON Schema draft 4).

#include <rapidjson/document.h>
#include <rapidjson/error/en.h>
#include <rapidjson/schema.h>
#include <rapidjson/stringbuffer.h>

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#ifndef ORECAST_SCHEMA_PATH
#error "ORECAST_SCHEMA_PATH must point at schemas/api.json"
#endif

namespace support {

class ApiSchema {
public:
	ApiSchema() : ApiSchema(ORECAST_SCHEMA_PATH) {}

	explicit ApiSchema(const std::string &path) {
		std::ifstream in(path);
		if (!in) {
			throw std::runtime_error("cannot open schema " + path);
		}
		std::stringstream ss;
		ss << in.rdbuf();
		source_.Parse(ss.str().c_str());
		if (source_.HasParseError() || !source_.HasMember("definitions")) {
			throw std::runtime_error("schema " + path + " is not valid JSON with definitions");
		}
	}

	/// Empty when `payload` matches the named definition, otherwise a
	/// description of the first violation.
	std::string check(std::string_view payload, const std::string &definition) const {
		rapidjson::Document doc;
		doc.Parse(payload.data(), payload.size());
		if (doc.HasParseError()) {
			return std::string("not JSON: ") + rapidjson::GetParseError_En(doc.GetParseError());
		}
		rapidjson::SchemaValidator validator(schema(definition));
		if (doc.Accept(validator)) {
			return {};
		}
		rapidjson::StringBuffer where;
		validator.GetInvalidDocumentPointer().StringifyUriFragment(where);
		rapidjson::StringBuffer rule;
		validator.GetInvalidSchemaPointer().StringifyUriFragment(rule);
		return definition + ": " + validator.GetInvalidSchemaKeyword() + " at " + where.GetString() + " (schema " +
		       rule.GetString() + ")";
	}

	bool has(const std::string &definition) const { return source_["definitions"].HasMember(definition.c_str()); }

private:
	const rapidjson::SchemaDocument &schema(const std::string &definition) const {
		auto it = compiled_.find(definition);
		if (it != compiled_.end()) {
			return *it->second;
		}
		if (!has(definition)) {
			throw std::runtime_error("no schema definition '" + definition + "'");
		}
		rapidjson::Document root(rapidjson::kObjectType);
		auto &a = root.GetAllocator();
		const std::string ref = "#/definitions/" + definition;
		root.AddMember("$ref", rapidjson::Value(ref.c_str(), a), a);
		root.AddMember("definitions", rapidjson::Value(source_["definitions"], a), a);
		auto compiled = std::make_unique<rapidjson::SchemaDocument>(root);
		return *compiled_.emplace(definition, std::move(compiled)).first->second;
	}

	rapidjson::Document source_;
	mutable std::map<std::string, std::unique_ptr<rapidjson::SchemaDocument>> compiled_;
};

} // namespace support
