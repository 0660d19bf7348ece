import { readFileSync } from "fs";
import { z } from "zod";
import { SchemaError } from "./errors.js";

export const figureSpecSchema = z
  .object({
    input: z.string().min(1),
    x: z.enum(["N", "T"]),
    seriesBy: z.enum(["nonlinearity", "N"]),
    logY: z.boolean().default(true),
    output: z
      .string()
      .regex(/\.(svg|png)$/i, "output path must end in .svg or .png"),
    width: z.number().int().min(200).default(720),
    height: z.number().int().min(150).default(480),
    title: z.string().optional(),
  })
  .strict()
  .refine((s) => s.x !== s.seriesBy, {
    message: "x axis and seriesBy must be different columns",
  });

export type FigureSpec = z.infer<typeof figureSpecSchema>;

export function loadFigureSpec(path: string): FigureSpec {
  let raw: string;
  try {
    raw = readFileSync(path, "utf8");
  } catch (err) {
    throw new SchemaError(`cannot read spec ${path}: ${(err as Error).message}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch (err) {
    throw new SchemaError(`spec ${path} is not valid JSON: ${(err as Error).message}`);
  }
  const result = figureSpecSchema.safeParse(parsed);
  if (!result.success) {
    const issues = result.error.issues
      .map((i) => `${i.path.join(".") || "(root)"}: ${i.message}`)
      .join("; ");
    throw new SchemaError(`spec ${path} failed schema validation: ${issues}`);
  }
  return result.data;
}
