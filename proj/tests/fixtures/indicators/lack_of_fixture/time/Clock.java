package time;

public class Clock {
    private long ticks;

    public void tick() {
        ticks = ticks + 1;
    }

    public void reset() {
        ticks = 0;
    }
}
