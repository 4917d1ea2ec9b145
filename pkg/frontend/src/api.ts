/** Typed client for the annotation service HTTP+JSON API. */

export interface TaskView {
  sample_id: string;
  iteration: number;
  proposed: string;
  probabilities: number[];
  labels: string[];
}

export interface SubmitAck {
  sample_id: string;
  final: string;
  changed: boolean;
  pending: number;
}

export interface LabelExample {
  sample_id: string;
  combination: string;
}

export interface LabelsView {
  labels: string[];
  exclusive_index: number;
  examples: Record<string, LabelExample[]>;
}

export interface IterationRecord {
  iteration: number;
  labeled_fraction: number;
  corrected_fraction: number;
  macro_accuracy: number;
}

export interface Progress {
  iteration: number;
  max_iterations: number;
  completed: boolean;
  labeled_fraction: number;
  labeled_count: number;
  pending: number;
  finalized: number;
  confirmed_total: number;
  corrected_total: number;
  latest: IterationRecord | null;
  series: IterationRecord[];
}

export interface AdvanceAck {
  iteration: number;
  completed: boolean;
  report: IterationRecord;
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

async function raise(response: Response): Promise<never> {
  let code = "unknown";
  let message = response.statusText;
  try {
    const body = await response.json();
    code = body.code ?? code;
    message = body.message ?? message;
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, code, message);
}

export class Client {
  constructor(private readonly baseUrl: string = "") {}

  /** Next pending task, or null when the queue is drained. */
  async fetchNext(): Promise<TaskView | null> {
    const r = await fetch(`${this.baseUrl}/api/queue/next`);
    if (r.status === 204) return null;
    if (!r.ok) return raise(r);
    return r.json();
  }

  async submitDecision(sampleId: string, final: string): Promise<SubmitAck> {
    const r = await fetch(`${this.baseUrl}/api/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ sample_id: sampleId, final }),
    });
    if (!r.ok) return raise(r);
    return r.json();
  }

  async getLabels(): Promise<LabelsView> {
    const r = await fetch(`${this.baseUrl}/api/labels`);
    if (!r.ok) return raise(r);
    return r.json();
  }

  async getProgress(): Promise<Progress> {
    const r = await fetch(`${this.baseUrl}/api/progress`);
    if (!r.ok) return raise(r);
    return r.json();
  }

  async advance(): Promise<AdvanceAck> {
    const r = await fetch(`${this.baseUrl}/api/iteration/advance`, {
      method: "POST",
    });
    if (!r.ok) return raise(r);
    return r.json();
  }
}
