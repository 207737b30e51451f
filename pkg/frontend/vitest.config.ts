import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'node',
    include: ['tests/**/*.test.ts'],
    // the e2e suite boots a real review service in a child process
    testTimeout: 60_000,
    hookTimeout: 60_000,
  },
});
