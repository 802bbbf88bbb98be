import json
import sys

import jsonschema

schema, doc = sys.argv[1], sys.argv[2]
with open(schema) as s, open(doc) as d:
    jsonschema.validate(json.load(d), json.load(s))
