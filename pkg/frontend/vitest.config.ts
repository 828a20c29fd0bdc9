import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "happy-dom",
    // The page and the session service share an origin in production
    // (chunklab serve --static); tests mirror that so fetch is same-origin.
    environmentOptions: {
      happyDOM: { url: "http://127.0.0.1:8753" },
    },
    include: ["tests/**/*.test.ts"],
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
