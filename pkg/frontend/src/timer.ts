/**
 * Batch timer: starts when a batch renders, so the on-screen clock matches
 * the served-to-submitted interval the service logs as labor time.
 */

export class BatchTimer {
  private startedAt: number | null = null;

  constructor(private readonly now: () => number = Date.now) {}

  start(): void {
    this.startedAt = this.now();
  }

  reset(): void {
    this.startedAt = null;
  }

  get running(): boolean {
    return this.startedAt !== null;
  }

  elapsedSeconds(): number {
    return this.startedAt === null ? 0 : (this.now() - this.startedAt) / 1000;
  }

  display(): string {
    const total = Math.floor(this.elapsedSeconds());
    const minutes = Math.floor(total / 60);
    const seconds = total % 60;
    return `${minutes}:${String(seconds).padStart(2, "0")}`;
  }
}
