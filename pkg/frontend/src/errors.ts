/** Any malformed input: bad spec JSON, unknown keys, CSV schema mismatch,
 * header-only CSV. The CLI maps this to exit code 2. */
export class SchemaError extends Error {}
