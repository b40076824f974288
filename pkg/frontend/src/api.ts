/**
 * Typed client for the network service.
 *
 * Request schemas mirror the service's validation (extra fields forbidden,
 * at least one event clause), so any payload this module refuses would have
 * been refused server-side too. Responses are parsed before they reach the
 * caller; a reply that does not match the documented shape surfaces as a
 * ContractViolation instead of propagating garbage into the page.
 *
 * No probability arithmetic happens here or anywhere above: the numbers in
 * a parsed response are handed over exactly as the service sent them.
 */

import { z } from "zod";

export const ClauseSchema = z.strictObject({
  var: z.string().min(1),
  states: z.array(z.string().min(1)).min(1),
});

export const QueryRequestSchema = z.strictObject({
  evidence: z.array(ClauseSchema),
  event: z.array(ClauseSchema).min(1),
  n_samples: z.number().int().min(1).nullish(),
  seed: z.number().int().nullish(),
});

export const ReverseRequestSchema = z.strictObject({
  driver: z.string().min(1),
  event: z.array(ClauseSchema).min(1),
});

// responses are parsed non-strictly: the service may grow fields
export const QueryResponseSchema = z.object({
  estimate: z.number(),
  ci_low: z.number(),
  ci_high: z.number(),
  method: z.string(),
  n_samples: z.number().int(),
  exact: z.number().nullable(),
});

export const VariableSchema = z.object({
  name: z.string().min(1),
  states: z.array(z.string().min(1)).min(1),
  kind: z.string(),
});

export const NetworkViewSchema = z.object({
  variables: z.array(VariableSchema).min(1),
  edges: z.array(
    z.object({
      parent: z.string(),
      child: z.string(),
      strength: z.number().nullable(),
    }),
  ),
  response_variables: z.array(z.string()),
});

export const ReverseResponseSchema = z.object({
  driver: z.string(),
  distribution: z.record(z.string(), z.number()),
});

export const ScenarioPresetSchema = z.object({
  name: z.string(),
  evidence: z.array(ClauseSchema),
  event: z.array(ClauseSchema).min(1),
  n_samples: z.number().int(),
  seed: z.number().int(),
});

export const ScenarioListSchema = z.object({
  scenarios: z.array(ScenarioPresetSchema),
});

const FieldErrorsSchema = z.object({
  errors: z.array(z.object({ field: z.string(), message: z.string() })),
});

const DetailSchema = z.object({ detail: z.string() });

export type Clause = z.infer<typeof ClauseSchema>;
export type QueryRequest = z.infer<typeof QueryRequestSchema>;
export type ReverseRequest = z.infer<typeof ReverseRequestSchema>;
export type QueryResponse = z.infer<typeof QueryResponseSchema>;
export type NetworkView = z.infer<typeof NetworkViewSchema>;
export type Variable = z.infer<typeof VariableSchema>;
export type ReverseResponse = z.infer<typeof ReverseResponseSchema>;
export type ScenarioPreset = z.infer<typeof ScenarioPresetSchema>;
export type FieldError = { field: string; message: string };

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
    this.name = "ServiceError";
  }
}

/** 400: the payload was malformed; carries the service's field messages. */
export class BadRequest extends ServiceError {
  constructor(readonly fieldErrors: FieldError[]) {
    super(
      fieldErrors.map((e) => `${e.field}: ${e.message}`).join("; ") ||
        "bad request",
      400,
    );
    this.name = "BadRequest";
  }
}

/** 422: well-formed but impossible (contradiction or zero-mass evidence). */
export class ImpossibleCombination extends ServiceError {
  constructor(readonly detail: string) {
    super(detail, 422);
    this.name = "ImpossibleCombination";
  }
}

/** The service answered 2xx with a body that fails the documented schema. */
export class ContractViolation extends Error {
  constructor(message: string) {
    super(message);
    this.name = "ContractViolation";
  }
}

export type FetchLike = (
  url: string,
  init?: RequestInit,
) => Promise<Response>;

async function raiseForStatus(res: Response): Promise<void> {
  if (res.ok) return;
  let body: unknown = null;
  try {
    body = await res.json();
  } catch {
    // non-JSON error body; fall through to the generic error
  }
  if (res.status === 400) {
    const parsed = FieldErrorsSchema.safeParse(body);
    if (parsed.success) throw new BadRequest(parsed.data.errors);
  }
  if (res.status === 422) {
    const parsed = DetailSchema.safeParse(body);
    if (parsed.success) throw new ImpossibleCombination(parsed.data.detail);
  }
  const detail = DetailSchema.safeParse(body);
  throw new ServiceError(
    detail.success ? detail.data.detail : `service returned ${res.status}`,
    res.status,
  );
}

function parseBody<T>(schema: z.ZodType<T>, body: unknown, what: string): T {
  const parsed = schema.safeParse(body);
  if (!parsed.success) {
    throw new ContractViolation(`${what}: ${parsed.error.message}`);
  }
  return parsed.data;
}

export class ServiceClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string,
    fetchFn?: FetchLike,
  ) {
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async get(path: string, signal?: AbortSignal): Promise<unknown> {
    const res = await this.fetchFn(this.baseUrl + path, { signal });
    await raiseForStatus(res);
    return res.json();
  }

  private async post(
    path: string,
    payload: unknown,
    signal?: AbortSignal,
  ): Promise<unknown> {
    const res = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
      signal,
    });
    await raiseForStatus(res);
    return res.json();
  }

  async network(signal?: AbortSignal): Promise<NetworkView> {
    const body = await this.get("/network", signal);
    return parseBody(NetworkViewSchema, body, "GET /network");
  }

  async query(
    request: QueryRequest,
    signal?: AbortSignal,
  ): Promise<QueryResponse> {
    // a request we would not accept must never go out; this is a bug trap,
    // not user-facing validation
    const checked = QueryRequestSchema.parse(request);
    const body = await this.post("/query", checked, signal);
    return parseBody(QueryResponseSchema, body, "POST /query");
  }

  async reverse(
    request: ReverseRequest,
    signal?: AbortSignal,
  ): Promise<ReverseResponse> {
    const checked = ReverseRequestSchema.parse(request);
    const body = await this.post("/reverse", checked, signal);
    return parseBody(ReverseResponseSchema, body, "POST /reverse");
  }

  async scenarios(signal?: AbortSignal): Promise<ScenarioPreset[]> {
    const body = await this.get("/scenarios", signal);
    return parseBody(ScenarioListSchema, body, "GET /scenarios").scenarios;
  }
}
